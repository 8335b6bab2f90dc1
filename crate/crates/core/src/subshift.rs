//! Shift spaces cut out by finitely many forbidden patterns, with exact
//! membership for finite, tube, and torus configurations, plus the
//! one-dimensional structure theory: the de Bruijn edge presentation,
//! strongly connected (transitive) components with a mixing classification,
//! and bi-infinitely extendable language extraction.
//!
//! Membership enumerates only positions where a forbidden pattern could
//! overlap nonzero content, plus a single background probe, so it is exact
//! on the infinite configuration, not an approximation over a window.
//!
//! A [`SoficPresentation`] is a labeled directed graph; a one-dimensional
//! finite-support configuration belongs to the presented shift exactly when
//! some bi-infinite labeled walk reads it, which reduces to reaching the
//! support from a 0-labeled cycle and leaving it into another.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{Alphabet, Config, FiniteConfig, Pattern, Symbol};
use crate::error::{Error, Result};
use crate::geometry::{check_dim, CellVector};
use crate::textio::{self, Scanner};

/// Hard ceiling on de Bruijn vertex counts (`|S|^{m-1}`).
const VERTEX_GUARD: u64 = 1 << 20;
/// Hard ceiling on enumerated language words per call.
const LANGUAGE_GUARD: usize = 1 << 20;
/// Hard ceiling on completions when a holey forbidden pattern is expanded
/// into contiguous words.
const HOLE_GUARD: u64 = 1 << 16;

/// A subshift of finite type: all configurations avoiding every listed
/// forbidden pattern at every position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    dim: usize,
    alphabet: Alphabet,
    forbidden: Vec<Pattern>,
}

impl Sft {
    pub fn new(dim: usize, alphabet: Alphabet, forbidden: Vec<Pattern>) -> Result<Sft> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for pattern in &forbidden {
            check_dim(dim, pattern.dim())?;
            if pattern.is_empty() {
                return Err(Error::Unsupported(
                    "forbidden patterns must constrain at least one cell".into(),
                ));
            }
            for (_, symbol) in pattern.cells() {
                alphabet.check(symbol)?;
            }
        }
        Ok(Sft {
            dim,
            alphabet,
            forbidden,
        })
    }

    /// The full shift: nothing forbidden.
    pub fn full_shift(dim: usize, alphabet: Alphabet) -> Result<Sft> {
        Sft::new(dim, alphabet, Vec::new())
    }

    /// One-dimensional subshift from forbidden words; word `w` forbids the
    /// pattern `w_0 … w_{k-1}` at cells `0..k`.
    pub fn from_words<W: AsRef<[Symbol]>>(alphabet: Alphabet, words: &[W]) -> Result<Sft> {
        let mut forbidden = Vec::new();
        for word in words {
            let cells = word
                .as_ref()
                .iter()
                .enumerate()
                .map(|(i, &s)| (CellVector::new(vec![i as i64]).expect("dim 1"), s));
            forbidden.push(Pattern::from_cells(1, cells)?);
        }
        Sft::new(1, alphabet, forbidden)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// Whether any forbidden pattern constrains all its cells to 0; such a
    /// pattern matches the background of every finite or tube configuration.
    fn forbids_background(&self) -> bool {
        self.forbidden.iter().any(|p| p.is_blank())
    }

    fn pattern_matches(&self, x: &Config, pattern: &Pattern, position: &CellVector) -> Result<bool> {
        for (cell, symbol) in pattern.cells() {
            if x.get(&position.add(cell)?)? != symbol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact membership for finite, tube, and torus configurations: true iff
    /// no translate of a forbidden pattern matches anywhere in the infinite
    /// configuration.
    pub fn contains(&self, x: &Config) -> Result<bool> {
        check_dim(self.dim, x.dim())?;
        if self.alphabet.size() != x.alphabet().size() {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet.size(),
                found: x.alphabet().size(),
            });
        }
        match x {
            Config::Finite(c) => {
                if self.forbids_background() {
                    return Ok(false);
                }
                // A match touching nonzero content pins the position into
                // {support cell - pattern cell}; matches touching none read
                // all zeros and were handled by the background probe.
                for pattern in &self.forbidden {
                    let mut positions = BTreeSet::new();
                    for (support_cell, _) in c.cells() {
                        for (pattern_cell, _) in pattern.cells() {
                            positions.insert(support_cell.sub(pattern_cell)?);
                        }
                    }
                    for position in positions {
                        if self.pattern_matches(x, pattern, &position)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Config::Tube(c) => {
                if self.forbids_background() {
                    return Ok(false);
                }
                let axis = c.axis();
                let period = c.period();
                for pattern in &self.forbidden {
                    let mut positions = BTreeSet::new();
                    for (support_cell, _) in c.quotient_cells() {
                        for (pattern_cell, _) in pattern.cells() {
                            let p = support_cell.sub(pattern_cell)?;
                            positions
                                .insert(p.with_coord(axis, p.coord(axis).rem_euclid(period))?);
                        }
                    }
                    for position in positions {
                        if self.pattern_matches(x, pattern, &position)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Config::Torus(c) => {
                // Matching is periodic along every axis, so the fundamental
                // domain exhausts all positions; reads wrap.
                for pattern in &self.forbidden {
                    for position in c.domain() {
                        if self.pattern_matches(x, pattern, &position)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Config::Overlay(_) => Err(Error::Unsupported(
                "membership of an overlay: flatten or test the parts".into(),
            )),
        }
    }

    /// Normalizes one-dimensional forbidden patterns to contiguous words:
    /// each pattern is translated to start at 0 and unconstrained interior
    /// cells are expanded over all symbols.
    pub fn forbidden_words(&self) -> Result<Vec<Vec<Symbol>>> {
        check_dim(1, self.dim)?;
        let mut words = BTreeSet::new();
        for pattern in &self.forbidden {
            let coords: Vec<i64> = pattern.cells().map(|(c, _)| c.coord(0)).collect();
            let lo = *coords.iter().min().expect("nonempty pattern");
            let hi = *coords.iter().max().expect("nonempty pattern");
            let length = (hi - lo + 1) as usize;
            let mut template: Vec<Option<Symbol>> = vec![None; length];
            for (cell, symbol) in pattern.cells() {
                template[(cell.coord(0) - lo) as usize] = Some(symbol);
            }
            let holes = template.iter().filter(|t| t.is_none()).count();
            let mut completions: u64 = 1;
            for _ in 0..holes {
                completions = completions.saturating_mul(self.alphabet.size() as u64);
                if completions > HOLE_GUARD {
                    return Err(Error::GuardExceeded {
                        what: "forbidden pattern hole expansion",
                        needed: completions as u128,
                        guard: HOLE_GUARD as u128,
                    });
                }
            }
            let mut fill = vec![0u32; holes];
            loop {
                let mut word = Vec::with_capacity(length);
                let mut next_hole = 0;
                for slot in &template {
                    match slot {
                        Some(symbol) => word.push(*symbol),
                        None => {
                            word.push(fill[next_hole]);
                            next_hole += 1;
                        }
                    }
                }
                words.insert(word);
                let mut i = holes;
                loop {
                    if i == 0 {
                        // Odometer exhausted; move on to the next pattern.
                        fill.clear();
                        break;
                    }
                    i -= 1;
                    fill[i] += 1;
                    if fill[i] < self.alphabet.size() {
                        break;
                    }
                    fill[i] = 0;
                }
                if fill.is_empty() && holes > 0 {
                    break;
                }
                if holes == 0 {
                    break;
                }
            }
        }
        Ok(words.into_iter().collect())
    }
}

/// A transitive (strongly connected, edge-bearing) component of the de
/// Bruijn presentation, with its mixing classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Indices into [`ComponentDecomposition::vertices`].
    pub vertices: Vec<usize>,
    /// Components are strongly connected with at least one edge, hence
    /// transitive as subshifts.
    pub transitive: bool,
    /// True iff the gcd of the component's cycle lengths is 1.
    pub mixing: bool,
}

/// An edge of the de Bruijn presentation: an allowed window word running
/// from its prefix vertex to its suffix vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnEdge {
    pub from: usize,
    pub to: usize,
    /// The allowed word of length `m` the edge stands for.
    pub word: Vec<Symbol>,
}

/// The de Bruijn presentation of a one-dimensional subshift of finite type
/// with its transitive components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// The window length `m`: the longest normalized forbidden word (1 when
    /// nothing is forbidden).
    pub window: usize,
    /// Allowed words of length `m - 1`, sorted; the graph's vertices.
    pub vertices: Vec<Vec<Symbol>>,
    /// Allowed words of length `m` as vertex-to-vertex edges.
    pub edges: Vec<DeBruijnEdge>,
    /// Transitive components in order of their smallest vertex index.
    pub components: Vec<Component>,
}

impl ComponentDecomposition {
    fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.from, e.to)).collect()
    }
}

fn has_factor(word: &[Symbol], factors: &[Vec<Symbol>]) -> bool {
    factors.iter().any(|f| {
        !f.is_empty()
            && word.len() >= f.len()
            && (0..=word.len() - f.len()).any(|i| &word[i..i + f.len()] == f.as_slice())
    })
}

/// All words of the given length over the alphabet avoiding the forbidden
/// factors, in sorted order.
fn allowed_words(alphabet: Alphabet, length: usize, forbidden: &[Vec<Symbol>]) -> Result<Vec<Vec<Symbol>>> {
    let mut count: u64 = 1;
    for _ in 0..length {
        count = count.saturating_mul(alphabet.size() as u64);
        if count > VERTEX_GUARD {
            return Err(Error::GuardExceeded {
                what: "de Bruijn vertex count",
                needed: count as u128,
                guard: VERTEX_GUARD as u128,
            });
        }
    }
    let mut words = Vec::new();
    let mut word = vec![0u32; length];
    loop {
        if !has_factor(&word, forbidden) {
            words.push(word.clone());
        }
        let mut i = length;
        loop {
            if i == 0 {
                return Ok(words);
            }
            i -= 1;
            word[i] += 1;
            if word[i] < alphabet.size() {
                break;
            }
            word[i] = 0;
        }
    }
}

/// Kosaraju's algorithm, iterative. Returns every strongly connected
/// component (singletons included) as sorted vertex lists.
fn strongly_connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out_edges = vec![Vec::new(); n];
    let mut in_edges = vec![Vec::new(); n];
    for &(u, v) in edges {
        out_edges[u].push(v);
        in_edges[v].push(u);
    }
    let mut finish_order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        visited[start] = true;
        while let Some(&mut (vertex, ref mut next)) = stack.last_mut() {
            if *next < out_edges[vertex].len() {
                let target = out_edges[vertex][*next];
                *next += 1;
                if !visited[target] {
                    visited[target] = true;
                    stack.push((target, 0));
                }
            } else {
                finish_order.push(vertex);
                stack.pop();
            }
        }
    }
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for &start in finish_order.iter().rev() {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component_of[start] = id;
        let mut stack = vec![start];
        while let Some(vertex) = stack.pop() {
            for &source in &in_edges[vertex] {
                if component_of[source] == usize::MAX {
                    component_of[source] = id;
                    members.push(source);
                    stack.push(source);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Period of a strongly connected subgraph via breadth-first potentials:
/// the gcd over its edges of `φ(u) + 1 − φ(v)`. The subgraph is mixing
/// (aperiodic) iff the result is 1.
fn cycle_gcd(vertices: &[usize], edges: &[(usize, usize)]) -> i64 {
    let members: BTreeSet<usize> = vertices.iter().copied().collect();
    let mut potential: BTreeMap<usize, i64> = BTreeMap::new();
    let root = vertices[0];
    potential.insert(root, 0);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in edges {
            if a == u && members.contains(&b) && !potential.contains_key(&b) {
                potential.insert(b, potential[&u] + 1);
                queue.push_back(b);
            }
        }
    }
    let mut g = 0;
    for &(a, b) in edges {
        if members.contains(&a) && members.contains(&b) {
            g = gcd(g, potential[&a] + 1 - potential[&b]);
        }
    }
    g
}

/// Builds the de Bruijn presentation of a one-dimensional subshift of finite
/// type and decomposes it into transitive components.
pub fn components_1d(x: &Sft) -> Result<ComponentDecomposition> {
    check_dim(1, x.dim())?;
    let forbidden = x.forbidden_words()?;
    let window = forbidden.iter().map(|w| w.len()).max().unwrap_or(1);
    let vertices = allowed_words(x.alphabet(), window - 1, &forbidden)?;
    let index: BTreeMap<&[Symbol], usize> =
        vertices.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for word in allowed_words(x.alphabet(), window, &forbidden)? {
        let prefix = &word[..window - 1];
        let suffix = &word[1..];
        if let (Some(&from), Some(&to)) = (index.get(prefix), index.get(suffix)) {
            edges.push(DeBruijnEdge { from, to, word });
        }
    }
    let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.from, e.to)).collect();
    let mut components = Vec::new();
    for members in strongly_connected_components(vertices.len(), &pairs) {
        let has_edge = pairs
            .iter()
            .any(|&(u, v)| members.binary_search(&u).is_ok() && members.binary_search(&v).is_ok());
        if !has_edge {
            continue;
        }
        let mixing = cycle_gcd(&members, &pairs) == 1;
        components.push(Component {
            vertices: members,
            transitive: true,
            mixing,
        });
    }
    components.sort_by_key(|c| c.vertices[0]);
    Ok(ComponentDecomposition {
        window,
        vertices,
        edges,
        components,
    })
}

/// Iteratively removes vertices without in-edges or without out-edges; what
/// survives carries exactly the bi-infinite paths.
fn trim_graph(n: usize, edges: &[(usize, usize)]) -> Vec<bool> {
    let mut alive = vec![true; n];
    loop {
        let mut in_degree = vec![0usize; n];
        let mut out_degree = vec![0usize; n];
        for &(u, v) in edges {
            if alive[u] && alive[v] {
                out_degree[u] += 1;
                in_degree[v] += 1;
            }
        }
        let mut changed = false;
        for v in 0..n {
            if alive[v] && (in_degree[v] == 0 || out_degree[v] == 0) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// The words of the given length appearing in configurations of the
/// subshift: path labels on the trimmed de Bruijn graph.
pub fn language_1d(x: &Sft, length: usize) -> Result<BTreeSet<Vec<Symbol>>> {
    check_dim(1, x.dim())?;
    let presentation = components_1d(x)?;
    let alive = trim_graph(presentation.vertices.len(), &presentation.edge_pairs());
    let mut words = BTreeSet::new();
    if length + 1 < presentation.window {
        // Short words are factors of the surviving window words.
        for (i, vertex) in presentation.vertices.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            for start in 0..=vertex.len() - length {
                words.insert(vertex[start..start + length].to_vec());
            }
        }
        return Ok(words);
    }
    // Walk paths of (length - window + 1) edges from every surviving vertex;
    // each edge appends the final symbol of its window word.
    let mut successors: Vec<Vec<(usize, Symbol)>> = vec![Vec::new(); presentation.vertices.len()];
    for edge in &presentation.edges {
        if alive[edge.from] && alive[edge.to] {
            successors[edge.from].push((edge.to, *edge.word.last().expect("window >= 1")));
        }
    }
    let steps = length + 1 - presentation.window;
    let mut frontier: Vec<(usize, Vec<Symbol>)> = presentation
        .vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| alive[*i])
        .map(|(i, w)| (i, w.clone()))
        .collect();
    for _ in 0..steps {
        let mut next = Vec::new();
        for (vertex, word) in frontier {
            for &(target, symbol) in &successors[vertex] {
                let mut extended = word.clone();
                extended.push(symbol);
                next.push((target, extended));
            }
            if next.len() > LANGUAGE_GUARD {
                return Err(Error::GuardExceeded {
                    what: "language word count",
                    needed: next.len() as u128,
                    guard: LANGUAGE_GUARD as u128,
                });
            }
        }
        frontier = next;
    }
    for (_, word) in frontier {
        words.insert(word);
    }
    Ok(words)
}

/// A labeled directed graph presenting a sofic shift. Construction trims the
/// graph to its essential part: states that both continue forward and are
/// reachable backward, so every remaining state lies on a bi-infinite walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoficPresentation {
    states: usize,
    edges: Vec<(usize, Symbol, usize)>,
}

impl SoficPresentation {
    pub fn new(states: usize, edges: Vec<(usize, Symbol, usize)>) -> Result<SoficPresentation> {
        for &(from, _, to) in &edges {
            if from >= states || to >= states {
                return Err(Error::Unsupported(format!(
                    "edge ({from}, {to}) leaves the {states}-state presentation"
                )));
            }
        }
        let plain: Vec<(usize, usize)> = edges.iter().map(|&(f, _, t)| (f, t)).collect();
        let alive = trim_graph(states, &plain);
        let mut remap = vec![usize::MAX; states];
        let mut kept = 0;
        for (state, keep) in alive.iter().enumerate() {
            if *keep {
                remap[state] = kept;
                kept += 1;
            }
        }
        if kept == 0 {
            return Err(Error::Unsupported(
                "presentation has no bi-infinite walks".into(),
            ));
        }
        let edges = edges
            .into_iter()
            .filter(|&(f, _, t)| alive[f] && alive[t])
            .map(|(f, s, t)| (remap[f], s, remap[t]))
            .collect();
        Ok(SoficPresentation {
            states: kept,
            edges,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn edges(&self) -> &[(usize, Symbol, usize)] {
        &self.edges
    }

    /// States lying on a cycle of 0-labeled edges.
    fn zero_cycle_states(&self) -> Vec<usize> {
        let zero_edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(_, s, _)| s == 0)
            .map(|&(f, _, t)| (f, t))
            .collect();
        let mut on_cycle = Vec::new();
        for members in strongly_connected_components(self.states, &zero_edges) {
            let has_edge = zero_edges
                .iter()
                .any(|&(u, v)| members.binary_search(&u).is_ok() && members.binary_search(&v).is_ok());
            if has_edge {
                on_cycle.extend(members);
            }
        }
        on_cycle
    }

    fn zero_closure(&self, seeds: &[usize], forward: bool) -> Vec<bool> {
        let mut reached = vec![false; self.states];
        let mut stack: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            reached[s] = true;
        }
        while let Some(state) = stack.pop() {
            for &(from, symbol, to) in &self.edges {
                if symbol != 0 {
                    continue;
                }
                let (source, target) = if forward { (from, to) } else { (to, from) };
                if source == state && !reached[target] {
                    reached[target] = true;
                    stack.push(target);
                }
            }
        }
        reached
    }

    /// Membership of a finite-support one-dimensional configuration: true
    /// iff some bi-infinite labeled walk reads it. The walk must idle on a
    /// 0-labeled cycle before the support and reach one after it.
    pub fn contains(&self, x: &FiniteConfig) -> Result<bool> {
        check_dim(1, x.dim())?;
        let cycle_states = self.zero_cycle_states();
        if cycle_states.is_empty() {
            return Ok(false);
        }
        let support = x.support()?;
        let (lo, hi) = match support.extent(0)? {
            None => return Ok(true),
            Some(range) => range,
        };
        // States reachable from a 0-cycle through 0-edges can anchor the
        // left tail; states 0-reaching a 0-cycle can anchor the right tail.
        let left = self.zero_closure(&cycle_states, true);
        let right = self.zero_closure(&cycle_states, false);
        let mut current = left;
        for position in lo..=hi {
            let symbol = x.get(&CellVector::new(vec![position])?)?;
            let mut next = vec![false; self.states];
            for &(from, label, to) in &self.edges {
                if label == symbol && current[from] {
                    next[to] = true;
                }
            }
            if next.iter().all(|&r| !r) {
                return Ok(false);
            }
            current = next;
        }
        Ok(current.iter().zip(&right).any(|(&c, &r)| c && r))
    }
}

const SFT_HEADER: &str = "%CA-SFT v1";

/// Parses the `%CA-SFT v1` text format.
pub fn parse_sft(text: &str) -> Result<Sft> {
    let mut scanner = Scanner::new(text);
    scanner.expect_header(SFT_HEADER)?;
    let mut dim: Option<usize> = None;
    let mut alphabet: Option<u32> = None;
    let mut patterns: Vec<Pattern> = Vec::new();
    let mut block: Vec<(usize, CellVector, Symbol)> = Vec::new();
    let mut in_patterns = false;

    let flush = |block: &mut Vec<(usize, CellVector, Symbol)>,
                     patterns: &mut Vec<Pattern>,
                     dim: usize|
     -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let mut pattern = Pattern::new(dim)?;
        for (line_no, cell, symbol) in block.drain(..) {
            if cell.dim() != dim {
                return Err(Error::parse(
                    line_no,
                    format!("cell {cell} has dimension {}, subshift has {dim}", cell.dim()),
                ));
            }
            if pattern.get(&cell).is_some() {
                return Err(Error::parse(line_no, format!("duplicate cell {cell}")));
            }
            pattern.set(cell, symbol)?;
        }
        patterns.push(pattern);
        Ok(())
    };

    while let Some((line_no, line)) = scanner.next_line() {
        if line.is_empty() {
            if in_patterns {
                if let Some(d) = dim {
                    flush(&mut block, &mut patterns, d)?;
                }
            }
            continue;
        }
        if in_patterns {
            if line == "forbid:" {
                let d = dim.ok_or_else(|| Error::parse(line_no, "missing `dim`"))?;
                flush(&mut block, &mut patterns, d)?;
                continue;
            }
            let (cell, symbol) = textio::cell_assignment(line_no, line)?;
            block.push((line_no, cell, symbol));
            continue;
        }
        if line == "forbid:" {
            in_patterns = true;
            continue;
        }
        let (key, value) = textio::key_value(line)
            .ok_or_else(|| Error::parse(line_no, format!("expected `key: value`, found `{line}`")))?;
        match key {
            "dim" => dim = Some(textio::parse_usize(line_no, value)?),
            "alphabet" => alphabet = Some(textio::parse_u32(line_no, value)?),
            other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
        }
    }

    let end = scanner.last_line();
    let dim = dim.ok_or_else(|| Error::parse(end, "missing `dim`"))?;
    let alphabet = Alphabet::new(alphabet.ok_or_else(|| Error::parse(end, "missing `alphabet`"))?)?;
    flush(&mut block, &mut patterns, dim)?;
    Sft::new(dim, alphabet, patterns)
}

/// Writes the canonical `%CA-SFT v1` text.
pub fn write_sft(x: &Sft) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{SFT_HEADER}").expect("string write");
    writeln!(out, "dim: {}", x.dim()).expect("string write");
    writeln!(out, "alphabet: {}", x.alphabet().size()).expect("string write");
    for pattern in x.forbidden() {
        writeln!(out, "forbid:").expect("string write");
        for (cell, symbol) in pattern.cells() {
            writeln!(out, "{cell}={symbol}").expect("string write");
        }
    }
    out
}
