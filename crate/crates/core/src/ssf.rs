//! Small-set-flip decoding.
//!
//! For one error sector the search space is every nonempty subset of every
//! stabilizer generator's support. Each step flips the subset with the largest
//! syndrome reduction per flipped qubit, for as long as some subset reduces
//! the syndrome at all. Ties go to the smaller subset, then the lower
//! generator index, then the numerically smaller mask, where bit `i` of a
//! mask selects the `i`-th support qubit in ascending order.
//!
//! A generator only sees the checks adjacent to its support, its window.
//! Windows are laid out canonically (support qubits ascending, each qubit's
//! checks ascending, first occurrence wins), so generators with the same
//! local incidence share one table of subset images. For a hypergraph product
//! of simple graphs all generators of a sector share a single table.
//!
//! In a product code a window is a grid: every check in it is adjacent to
//! exactly one qubit of each of two groups. The image of a subset is then
//! determined row by row, and the best subset can be found by enumerating
//! the subsets of the smaller group and greedily adding rows of the larger
//! one. Other windows fall back to scanning every mask.
//!
//! The decoder keeps a heap with at most one live entry per generator: the
//! exact best subset for the generator's current window, or an upper bound on
//! its ratio. A bound sorts ahead of every exact entry of equal ratio, so the
//! top entry is the argmax unless it is a bound, which is then refined. Two
//! bounds are combined: the largest number of unsatisfied checks adjacent to
//! one support qubit, and the previous value plus two per check of the window
//! that has become unsatisfied since. After a flip only the generators whose
//! windows changed are touched.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use dashmap::DashMap;
use rustc_hash::FxBuildHasher;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::{flip_bit, get_bit, words_for, BitVector};
use crate::hgp::{CssCode, Sector};

/// Default cap on generator weight. A table holds `2^w` images.
pub const DEFAULT_WEIGHT_CAP: usize = 20;

/// Hard limit on the cap: masks are `u32`.
const MAX_WEIGHT_CAP: usize = 30;

/// Default cap on memoized window patterns per table.
pub const DEFAULT_MEMO_CAP: usize = 1 << 21;

/// Largest grid side that is enumerated exhaustively.
const MAX_GRID_SHORT: usize = 7;

/// Population count of a byte, by table; `count_ones` is not a single
/// instruction on baseline x86-64.
#[inline]
fn pop8(x: u32) -> i32 {
    const T: [u8; 256] = {
        let mut t = [0u8; 256];
        let mut i = 0;
        while i < 256 {
            t[i] = (i as u32).count_ones() as u8;
            i += 1;
        }
        t
    };
    T[x as usize & 0xFF] as i32
}

/// Compressed adjacency lists.
#[derive(Clone, Debug, Default)]
struct Csr {
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl Csr {
    fn from_lists<I, J>(lists: I) -> Self
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = usize>,
    {
        let mut offsets = vec![0];
        let mut items = Vec::new();
        for list in lists {
            items.extend(list.into_iter().map(|x| x as u32));
            offsets.push(items.len());
        }
        Self { offsets, items }
    }

    #[inline]
    fn get(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Best subset of one generator for a given window pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LocalBest {
    reduction: u32,
    size: u32,
    mask: u32,
}

impl LocalBest {
    fn pack(b: Option<Self>) -> u64 {
        b.map_or(0, |b| 1 << 63 | (b.reduction as u64) << 40 | (b.size as u64) << 32 | b.mask as u64)
    }

    fn unpack(v: u64) -> Option<Self> {
        (v >> 63 == 1).then_some(Self {
            reduction: (v >> 40 & 0x7F_FFFF) as u32,
            size: (v >> 32 & 0xFF) as u32,
            mask: v as u32,
        })
    }
}

/// Running argmax under the decoder's order. `r == 0` means empty.
#[derive(Default)]
struct Argmax {
    r: u32,
    s: u32,
    mask: u32,
}

impl Argmax {
    /// Offers a subset with reduction `r > 0` and size `s`; the mask is
    /// only computed when it can matter.
    #[inline]
    fn offer(&mut self, r: u32, s: u32, mask: impl FnOnce() -> u32) {
        if self.r == 0 {
            *self = Self { r, s, mask: mask() };
            return;
        }
        let lhs = r as u64 * self.s as u64;
        let rhs = self.r as u64 * s as u64;
        if lhs > rhs || (lhs == rhs && s < self.s) {
            *self = Self { r, s, mask: mask() };
        } else if lhs == rhs && s == self.s {
            let m = mask();
            if m < self.mask {
                self.mask = m;
            }
        }
    }

    fn get(&self) -> Option<LocalBest> {
        (self.r > 0).then_some(LocalBest {
            reduction: self.r,
            size: self.s,
            mask: self.mask,
        })
    }
}

/// Product layout of a window: cell `(i, j)` is the check shared by the
/// `i`-th qubit of the long group and the `j`-th qubit of the short group.
struct Grid {
    short_pos: Vec<u32>,
    long_pos: Vec<u32>,
    cells: Vec<u32>,
    /// `cells[k] == k` within a single word, so rows are plain shifts.
    contiguous: bool,
    /// Indexed by `row << e | S`: the lane increment of the row's gain and
    /// the row's score when only `S` is flipped.
    lane_of: Vec<u64>,
    base_of: Vec<i8>,
}

impl Grid {
    /// Recognizes a grid from the window bits of each support qubit.
    fn detect(window_len: usize, local: &[Vec<usize>]) -> Option<Self> {
        let w = local.len();
        if w < 2 {
            return None;
        }
        let mut owners = vec![Vec::new(); window_len];
        for (q, bits) in local.iter().enumerate() {
            for &b in bits {
                owners[b].push(q);
            }
        }
        let first_group: Vec<bool> = {
            let mut g = vec![true; w];
            for &b in &local[0] {
                for &q in &owners[b] {
                    if q != 0 {
                        g[q] = false;
                    }
                }
            }
            g
        };
        let a: Vec<usize> = (0..w).filter(|&q| first_group[q]).collect();
        let b: Vec<usize> = (0..w).filter(|&q| !first_group[q]).collect();
        if b.is_empty() || a.len() * b.len() != window_len {
            return None;
        }
        let (short, long) = if b.len() <= a.len() { (b, a) } else { (a, b) };
        if short.len() > MAX_GRID_SHORT || long.len() > 31 {
            return None;
        }
        let mut rank = vec![(false, 0usize); w];
        for (j, &q) in short.iter().enumerate() {
            rank[q] = (true, j);
        }
        for (i, &q) in long.iter().enumerate() {
            rank[q] = (false, i);
        }
        let e = short.len();
        let mut cells = vec![u32::MAX; long.len() * e];
        for (bit, own) in owners.iter().enumerate() {
            let [x, y] = own[..] else { return None };
            let (rx, ry) = (rank[x], rank[y]);
            let (i, j) = match (rx.0, ry.0) {
                (false, true) => (rx.1, ry.1),
                (true, false) => (ry.1, rx.1),
                _ => return None,
            };
            if cells[i * e + j] != u32::MAX {
                return None;
            }
            cells[i * e + j] = bit as u32;
        }
        let contiguous = window_len <= 64 && cells.iter().enumerate().all(|(k, &c)| c as usize == k);
        let mut lane_of = Vec::with_capacity(1 << (2 * e));
        let mut base_of = Vec::with_capacity(1 << (2 * e));
        for row in 0..1u32 << e {
            for s in 0..1u32 << e {
                let inter = pop8(row & s);
                let ss = pop8(s);
                lane_of.push(1u64 << (8 * (pop8(row) - 2 * inter + ss)));
                base_of.push((2 * inter - ss) as i8);
            }
        }
        Some(Self {
            short_pos: short.iter().map(|&q| q as u32).collect(),
            long_pos: long.iter().map(|&q| q as u32).collect(),
            cells,
            contiguous,
            lane_of,
            base_of,
        })
    }

    /// Exact argmax. For a fixed subset `S` of the short group, taking long
    /// row `i` changes the score by `g_i`, independently of the other rows,
    /// so the best rows for a given count are the largest `g_i`, and the best
    /// count is reached by adding rows while `g_i` beats the running ratio.
    fn best(&self, pattern: &[u64]) -> Option<LocalBest> {
        let e = self.short_pos.len();
        let t = self.long_pos.len();
        let ei = e as i32;
        let full = (1u32 << e) - 1;
        let mut rows = [0u32; 32];
        if self.contiguous {
            let p = pattern[0];
            for (i, r) in rows.iter_mut().enumerate().take(t) {
                *r = (p >> (i * e)) as u32 & full;
            }
        } else {
            for (i, r) in rows.iter_mut().enumerate().take(t) {
                for j in 0..e {
                    if get_bit(pattern, self.cells[i * e + j] as usize) {
                        *r |= 1 << j;
                    }
                }
            }
        }
        let mut nonzero = [0u8; 32];
        let mut nz = 0;
        for (i, &r) in rows.iter().enumerate().take(t) {
            if r != 0 {
                nonzero[nz] = i as u8;
                nz += 1;
            }
        }
        let zero_rows = (t - nz) as i32;

        let mut best = Argmax::default();
        let mut keys = [0usize; 32];
        for (k, &i) in nonzero[..nz].iter().enumerate() {
            keys[k] = (rows[i as usize] as usize) << e;
        }
        let keys = &keys[..nz];
        for s in 0..=full {
            let ss = pop8(s);
            // Gains lie in -e, -e + 2, .., e; lane (g + e) / 2 of `lanes`
            // counts the rows with gain g, one byte per lane.
            let mut lanes = (zero_rows as u64) << (8 * ss);
            let mut base = -ss * zero_rows;
            for &key in keys {
                lanes += self.lane_of[key | s as usize];
                base += self.base_of[key | s as usize] as i32;
            }
            let top = (63 - lanes.leading_zeros() as i32) / 8;
            let gmax = 2 * top - ei;
            // Adding rows to S gives a mediant of base/ss and the gains, so
            // the ratio is at most the largest of them.
            let (br, bs) = (best.r as i64, best.s as i64);
            let gmax_low = if best.r == 0 { gmax <= 0 } else { gmax as i64 * bs < br };
            let base_low = ss == 0 || if best.r == 0 { base <= 0 } else { base as i64 * bs < br * ss as i64 };
            if gmax_low && base_low {
                continue;
            }
            // A row worth taking stays worth taking after another row of
            // the same gain is added, so lanes are taken whole.
            if ss == 0 {
                // Without short-side qubits only one row can be taken.
                if gmax > 0 {
                    let row = (0..t).find(|&i| 2 * pop8(rows[i]) - ei == gmax).expect("top lane is occupied");
                    best.offer(gmax as u32, 1, || 1 << self.long_pos[row]);
                }
                continue;
            }
            let (mut num, mut den, mut k, mut last) = (base, ss, 0i32, 0i32);
            let mut lane = top;
            while lane >= 0 {
                let c = (lanes >> (8 * lane)) as i32 & 0xFF;
                let val = 2 * lane - ei;
                if c > 0 {
                    if val * den <= num {
                        break;
                    }
                    num += c * val;
                    den += c;
                    k += c;
                    last = val;
                }
                lane -= 1;
            }
            if num <= 0 {
                continue;
            }
            best.offer(num as u32, den as u32, || {
                let g = |i: usize| 2 * pop8(rows[i]) - 4 * pop8(rows[i] & s) - ei + 2 * ss;
                let mut mask = 0u32;
                for (j, &q) in self.short_pos.iter().enumerate() {
                    if s >> j & 1 == 1 {
                        mask |= 1 << q;
                    }
                }
                for (i, &q) in self.long_pos.iter().enumerate() {
                    if k > 0 && g(i) >= last {
                        mask |= 1 << q;
                    }
                }
                mask
            });
        }
        best.get()
    }
}

/// Subset images shared by all generators with the same local incidence.
struct SubsetTable {
    weight: usize,
    window_len: usize,
    stride: usize,
    /// Image of mask `s` in window bits, at `s * stride`.
    images: Vec<u64>,
    image_weight: Vec<u16>,
    grid: Option<Grid>,
    /// Results by window pattern, for single-word windows.
    memo: DashMap<u64, u64, FxBuildHasher>,
    memo_len: AtomicUsize,
}

impl SubsetTable {
    fn build(weight: usize, window_len: usize, local: &[Vec<usize>]) -> Self {
        let stride = words_for(window_len).max(1);
        let columns: Vec<Vec<u64>> = local
            .iter()
            .map(|bits| {
                let mut col = vec![0u64; stride];
                for &b in bits {
                    flip_bit(&mut col, b);
                }
                col
            })
            .collect();
        let n = 1usize << weight;
        let mut images = vec![0u64; n * stride];
        let mut image_weight = vec![0u16; n];
        for s in 1..n {
            let low = s.trailing_zeros() as usize;
            let prev = s & (s - 1);
            let mut w = 0;
            for k in 0..stride {
                let v = images[prev * stride + k] ^ columns[low][k];
                images[s * stride + k] = v;
                w += v.count_ones();
            }
            image_weight[s] = w as u16;
        }
        Self {
            weight,
            window_len,
            stride,
            images,
            image_weight,
            grid: Grid::detect(window_len, local),
            memo: DashMap::with_hasher(FxBuildHasher),
            memo_len: AtomicUsize::new(0),
        }
    }

    #[inline]
    fn image(&self, mask: usize) -> &[u64] {
        &self.images[mask * self.stride..(mask + 1) * self.stride]
    }

    /// Argmax by scanning every mask against the cached images.
    fn best_exhaustive(&self, pattern: &[u64]) -> Option<LocalBest> {
        let mut best = Argmax::default();
        for mask in 1..1usize << self.weight {
            let inter: u32 = self
                .image(mask)
                .iter()
                .zip(pattern)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            let r = 2 * inter as i32 - self.image_weight[mask] as i32;
            if r > 0 {
                best.offer(r as u32, mask.count_ones(), || mask as u32);
            }
        }
        best.get()
    }

    fn best(&self, pattern: &[u64]) -> Option<LocalBest> {
        match &self.grid {
            Some(g) => g.best(pattern),
            None => self.best_exhaustive(pattern),
        }
    }

    fn best_memoized(&self, pattern: &[u64], memo_cap: usize) -> Option<LocalBest> {
        if self.stride > 1 || memo_cap == 0 {
            return self.best(pattern);
        }
        if let Some(hit) = self.memo.get(&pattern[0]) {
            return LocalBest::unpack(*hit);
        }
        let best = self.best(pattern);
        if self.memo_len.load(AtomicOrdering::Relaxed) < memo_cap {
            self.memo.insert(pattern[0], LocalBest::pack(best));
            self.memo_len.fetch_add(1, AtomicOrdering::Relaxed);
        }
        best
    }
}

/// Per-generator subset tables for one sector of a CSS code.
pub struct SmallSetCatalog {
    sector: Sector,
    n_qubits: usize,
    n_checks: usize,
    supports: Csr,
    windows: Csr,
    class_of: Vec<u32>,
    classes: Vec<SubsetTable>,
    check_qubits: Csr,
    check_generators: Csr,
    memo_cap: usize,
}

/// Builds the catalog for `sector`: generators are the rows of
/// `c.stabilizers(sector)` and images live in `c.detecting(sector)`.
pub fn build_catalog(c: &CssCode, sector: Sector, weight_cap: usize) -> Result<SmallSetCatalog> {
    if weight_cap > MAX_WEIGHT_CAP {
        return Err(Error::InvalidParameters(format!(
            "weight cap {weight_cap} exceeds {MAX_WEIGHT_CAP}"
        )));
    }
    let gens = c.stabilizers(sector);
    let det = c.detecting(sector);
    for (g, row) in gens.rows().enumerate() {
        if row.len() > weight_cap {
            return Err(Error::GeneratorTooHeavy {
                generator: g,
                weight: row.len(),
                cap: weight_cap,
            });
        }
    }

    let mut windows = Vec::with_capacity(gens.n_rows());
    let mut class_of = Vec::with_capacity(gens.n_rows());
    let mut classes = Vec::new();
    let mut signatures = std::collections::HashMap::new();
    let mut pos = vec![usize::MAX; det.n_rows()];
    for row in gens.rows() {
        let mut window: Vec<usize> = Vec::new();
        let mut local: Vec<Vec<usize>> = Vec::with_capacity(row.len());
        for &q in row {
            let mut bits = Vec::new();
            for &j in det.column(q) {
                if pos[j] == usize::MAX {
                    pos[j] = window.len();
                    window.push(j);
                }
                bits.push(pos[j]);
            }
            local.push(bits);
        }
        for &j in &window {
            pos[j] = usize::MAX;
        }
        let next = classes.len();
        let class = *signatures.entry((window.len(), local.clone())).or_insert(next);
        if class == next {
            classes.push(SubsetTable::build(row.len(), window.len(), &local));
        }
        class_of.push(class as u32);
        windows.push(window);
    }

    let mut by_check = vec![Vec::new(); det.n_rows()];
    for (g, w) in windows.iter().enumerate() {
        for &j in w {
            by_check[j].push(g);
        }
    }
    Ok(SmallSetCatalog {
        sector,
        n_qubits: c.n_qubits(),
        n_checks: det.n_rows(),
        supports: Csr::from_lists(gens.rows().map(|r| r.iter().copied())),
        windows: Csr::from_lists(windows),
        class_of,
        classes,
        check_qubits: Csr::from_lists(det.rows().map(|r| r.iter().copied())),
        check_generators: Csr::from_lists(by_check),
        memo_cap: DEFAULT_MEMO_CAP,
    })
}

impl SmallSetCatalog {
    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_generators(&self) -> usize {
        self.supports.len()
    }

    /// Number of distinct subset tables.
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Whether every table has a product layout.
    pub fn all_grids(&self) -> bool {
        self.classes.iter().all(|c| c.grid.is_some())
    }

    /// Caps the number of memoized patterns per table; `0` disables the memo.
    pub fn set_memo_cap(&mut self, cap: usize) {
        self.memo_cap = cap;
    }

    pub fn generator_support(&self, g: usize) -> BitVector {
        let s = self.supports.get(g).iter().map(|&q| q as usize).collect();
        BitVector::from_sorted_unchecked(self.n_qubits, s)
    }

    /// `2^w - 1` for a generator of weight `w`.
    pub fn subset_count(&self, g: usize) -> usize {
        (1usize << self.supports.get(g).len()) - 1
    }

    /// Generators whose window contains check `j`, ascending.
    pub fn generators_touching(&self, j: usize) -> &[u32] {
        self.check_generators.get(j)
    }

    /// The qubits selected by `mask` from generator `g`'s support.
    pub fn subset_support(&self, g: usize, mask: u32) -> Result<BitVector> {
        self.check_mask(g, mask)?;
        let sup = self.supports.get(g);
        let s = (0..sup.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| sup[i] as usize)
            .collect();
        Ok(BitVector::from_sorted_unchecked(self.n_qubits, s))
    }

    /// The cached syndrome image of a subset, mapped back to check indices.
    pub fn subset_syndrome(&self, g: usize, mask: u32) -> Result<BitVector> {
        self.check_mask(g, mask)?;
        let table = self.table(g);
        let window = self.windows.get(g);
        let img = table.image(mask as usize);
        let checks = (0..table.window_len)
            .filter(|&b| get_bit(img, b))
            .map(|b| window[b] as usize);
        BitVector::from_indices(self.n_checks, checks)
    }

    fn check_mask(&self, g: usize, mask: u32) -> Result<()> {
        if g >= self.n_generators() {
            return Err(Error::IndexOutOfRange {
                index: g,
                len: self.n_generators(),
            });
        }
        let count = self.subset_count(g);
        if mask == 0 || mask as usize > count {
            return Err(Error::IndexOutOfRange {
                index: mask as usize,
                len: count + 1,
            });
        }
        Ok(())
    }

    fn table(&self, g: usize) -> &SubsetTable {
        &self.classes[self.class_of[g] as usize]
    }

    fn fill_pattern(&self, g: usize, syndrome: &[u64], pattern: &mut Vec<u64>) {
        let table = self.table(g);
        pattern.clear();
        pattern.resize(table.stride, 0);
        for (b, &j) in self.windows.get(g).iter().enumerate() {
            if get_bit(syndrome, j as usize) {
                flip_bit(pattern, b);
            }
        }
    }

    fn check_syndrome(&self, s: &BitVector) -> Result<()> {
        if s.len() != self.n_checks {
            return Err(Error::DimensionMismatch {
                expected: self.n_checks,
                found: s.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeStatus {
    Converged,
    Fail,
}

fn support_list<S: Serializer>(v: &BitVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.support().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    #[serde(serialize_with = "support_list")]
    pub deduced_error: BitVector,
    pub iterations: usize,
    pub final_syndrome_weight: usize,
    /// `|σ_i|` for every iteration `i`, starting from the input, when
    /// tracing is enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syndrome_trace: Option<Vec<usize>>,
}

impl DecodeOutcome {
    pub fn converged(&self) -> bool {
        self.status == DecodeStatus::Converged
    }
}

/// Heap key. Exact entries have `size = den >= 1`; bounds have `size = 0`,
/// which sorts them first among equal ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Entry {
    num: u32,
    den: u32,
    size: u32,
    gen: u32,
    mask: u32,
}

impl Entry {
    fn exact(gen: usize, b: LocalBest) -> Self {
        Self {
            num: b.reduction,
            den: b.size,
            size: b.size,
            gen: gen as u32,
            mask: b.mask,
        }
    }

    fn bound(gen: usize, num: u32, den: u32) -> Self {
        Self {
            num,
            den,
            size: 0,
            gen: gen as u32,
            mask: 0,
        }
    }

    fn is_bound(&self) -> bool {
        self.size == 0
    }
}

impl Ord for Entry {
    /// Larger ratio first, then smaller size, generator and mask.
    fn cmp(&self, o: &Self) -> Ordering {
        (o.num as u64 * self.den as u64)
            .cmp(&(self.num as u64 * o.den as u64))
            .then(self.size.cmp(&o.size))
            .then(self.gen.cmp(&o.gen))
            .then(self.mask.cmp(&o.mask))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Heap item; live while `stamp` matches the generator's current stamp.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Item {
    entry: Entry,
    stamp: u32,
}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.entry.cmp(&self.entry)
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Reusable decoding state for one catalog. Not shared between threads.
pub struct SsfDecoder<'a> {
    catalog: &'a SmallSetCatalog,
    syndrome: Vec<u64>,
    weight: usize,
    unsat: Vec<u16>,
    correction: Vec<u64>,
    heap: BinaryHeap<Item>,
    stamp: Vec<u32>,
    /// Ratio of the live entry, `(0, 1)` when no subset can help.
    value: Vec<(u32, u32)>,
    /// Window checks that became unsatisfied since the last refresh.
    raised: Vec<u16>,
    dirty: Vec<u32>,
    is_dirty: Vec<bool>,
    pattern: Vec<u64>,
    trace: bool,
}

impl<'a> SsfDecoder<'a> {
    pub fn new(catalog: &'a SmallSetCatalog) -> Self {
        let ng = catalog.n_generators();
        Self {
            catalog,
            syndrome: vec![0; words_for(catalog.n_checks)],
            weight: 0,
            unsat: vec![0; catalog.n_qubits],
            correction: vec![0; words_for(catalog.n_qubits)],
            heap: BinaryHeap::new(),
            stamp: vec![0; ng],
            value: vec![(0, 1); ng],
            raised: vec![0; ng],
            dirty: Vec::new(),
            is_dirty: vec![false; ng],
            pattern: Vec::new(),
            trace: false,
        }
    }

    /// Records `|σ_i|` per iteration in the outcome.
    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn catalog(&self) -> &'a SmallSetCatalog {
        self.catalog
    }

    pub fn decode(&mut self, syndrome: &BitVector) -> Result<DecodeOutcome> {
        let cat = self.catalog;
        cat.check_syndrome(syndrome)?;
        self.reset();
        for &j in syndrome.support() {
            self.toggle_check(j);
        }
        self.refresh_dirty();

        let mut iterations = 0;
        let mut trace = self.trace.then(|| vec![self.weight]);
        while let Some(item) = self.heap.pop() {
            let g = item.entry.gen as usize;
            if item.stamp != self.stamp[g] {
                continue;
            }
            if item.entry.is_bound() {
                cat.fill_pattern(g, &self.syndrome, &mut self.pattern);
                let best = cat.table(g).best_memoized(&self.pattern, cat.memo_cap);
                self.set_entry(g, best.map(|b| Entry::exact(g, b)));
                continue;
            }
            let before = self.weight;
            self.apply(g, item.entry.mask);
            debug_assert!(self.weight < before);
            self.refresh_dirty();
            iterations += 1;
            if let Some(t) = trace.as_mut() {
                t.push(self.weight);
            }
        }
        Ok(self.outcome(iterations, trace))
    }

    fn reset(&mut self) {
        self.syndrome.fill(0);
        self.weight = 0;
        self.unsat.fill(0);
        self.correction.fill(0);
        self.heap.clear();
        self.value.fill((0, 1));
        self.raised.fill(0);
    }

    fn set_entry(&mut self, g: usize, entry: Option<Entry>) {
        self.stamp[g] = self.stamp[g].wrapping_add(1);
        match entry {
            Some(e) => {
                self.value[g] = (e.num, e.den);
                self.heap.push(Item {
                    entry: e,
                    stamp: self.stamp[g],
                });
            }
            None => self.value[g] = (0, 1),
        }
    }

    fn toggle_check(&mut self, j: usize) {
        let cat = self.catalog;
        let now_unsat = !get_bit(&self.syndrome, j);
        flip_bit(&mut self.syndrome, j);
        for &q in cat.check_qubits.get(j) {
            let u = &mut self.unsat[q as usize];
            if now_unsat {
                *u += 1;
            } else {
                *u -= 1;
            }
        }
        if now_unsat {
            self.weight += 1;
        } else {
            self.weight -= 1;
        }
        for &g in cat.check_generators.get(j) {
            let g = g as usize;
            if now_unsat {
                self.raised[g] += 1;
            }
            if !self.is_dirty[g] {
                self.is_dirty[g] = true;
                self.dirty.push(g as u32);
            }
        }
    }

    fn apply(&mut self, g: usize, mask: u32) {
        let cat = self.catalog;
        let sup = cat.supports.get(g);
        let mut m = mask;
        while m != 0 {
            flip_bit(&mut self.correction, sup[m.trailing_zeros() as usize] as usize);
            m &= m - 1;
        }
        let table = cat.table(g);
        let window = cat.windows.get(g);
        for (k, &word) in table.image(mask as usize).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = k * 64 + bits.trailing_zeros() as usize;
                self.toggle_check(window[b] as usize);
                bits &= bits - 1;
            }
        }
    }

    /// Replaces each changed generator's entry by a fresh bound.
    fn refresh_dirty(&mut self) {
        let cat = self.catalog;
        let dirty = std::mem::take(&mut self.dirty);
        for &g in &dirty {
            let g = g as usize;
            self.is_dirty[g] = false;
            let t = cat
                .supports
                .get(g)
                .iter()
                .map(|&q| self.unsat[q as usize] as u32)
                .max()
                .unwrap_or(0);
            let (vn, vd) = self.value[g];
            let raised = std::mem::take(&mut self.raised[g]) as u32;
            let (num, den) = (vn + 2 * raised * vd, vd);
            let (num, den) = if t as u64 * den as u64 <= num as u64 {
                (t, 1)
            } else {
                (num, den)
            };
            self.set_entry(g, (num > 0).then(|| Entry::bound(g, num, den)));
        }
        self.dirty = dirty;
        self.dirty.clear();
    }

    fn outcome(&self, iterations: usize, trace: Option<Vec<usize>>) -> DecodeOutcome {
        DecodeOutcome {
            status: if self.weight == 0 {
                DecodeStatus::Converged
            } else {
                DecodeStatus::Fail
            },
            deduced_error: BitVector::from_words(&self.correction, self.catalog.n_qubits),
            iterations,
            final_syndrome_weight: self.weight,
            syndrome_trace: trace,
        }
    }
}

/// Decodes one syndrome with a fresh workspace.
pub fn small_set_flip(catalog: &SmallSetCatalog, syndrome: &BitVector) -> Result<DecodeOutcome> {
    SsfDecoder::new(catalog).decode(syndrome)
}

/// The same decoder without bounds, memo, grid search or incremental
/// updates: every iteration scans every mask of every generator against the
/// cached images. Used to cross-check [`SsfDecoder`].
pub fn small_set_flip_full_scan(
    catalog: &SmallSetCatalog,
    syndrome: &BitVector,
) -> Result<DecodeOutcome> {
    catalog.check_syndrome(syndrome)?;
    let mut s = syndrome.to_words();
    s.resize(words_for(catalog.n_checks), 0);
    let mut weight = syndrome.weight();
    let mut correction = vec![0u64; words_for(catalog.n_qubits)];
    let mut pattern = Vec::new();
    let mut iterations = 0;
    loop {
        let mut best: Option<Entry> = None;
        for g in 0..catalog.n_generators() {
            catalog.fill_pattern(g, &s, &mut pattern);
            if let Some(b) = catalog.table(g).best_exhaustive(&pattern) {
                let e = Entry::exact(g, b);
                if best.is_none_or(|cur| e < cur) {
                    best = Some(e);
                }
            }
        }
        let Some(e) = best else { break };
        let g = e.gen as usize;
        for (i, &q) in catalog.supports.get(g).iter().enumerate() {
            if e.mask >> i & 1 == 1 {
                flip_bit(&mut correction, q as usize);
            }
        }
        let img = catalog.table(g).image(e.mask as usize);
        for (b, &j) in catalog.windows.get(g).iter().enumerate() {
            if get_bit(img, b) {
                let j = j as usize;
                if get_bit(&s, j) {
                    weight -= 1;
                } else {
                    weight += 1;
                }
                flip_bit(&mut s, j);
            }
        }
        iterations += 1;
    }
    Ok(DecodeOutcome {
        status: if weight == 0 {
            DecodeStatus::Converged
        } else {
            DecodeStatus::Fail
        },
        deduced_error: BitVector::from_words(&correction, catalog.n_qubits),
        iterations,
        final_syndrome_weight: weight,
        syndrome_trace: None,
    })
}

/// Catalogs for both sectors of a code.
pub struct CssCatalogs {
    /// Corrects Z errors from the X syndrome.
    pub z: SmallSetCatalog,
    /// Corrects X errors from the Z syndrome.
    pub x: SmallSetCatalog,
}

impl CssCatalogs {
    pub fn build(c: &CssCode, weight_cap: usize) -> Result<Self> {
        Ok(Self {
            z: build_catalog(c, Sector::Z, weight_cap)?,
            x: build_catalog(c, Sector::X, weight_cap)?,
        })
    }

    pub fn get(&self, sector: Sector) -> &SmallSetCatalog {
        match sector {
            Sector::Z => &self.z,
            Sector::X => &self.x,
        }
    }

    pub fn set_memo_cap(&mut self, cap: usize) {
        self.z.set_memo_cap(cap);
        self.x.set_memo_cap(cap);
    }
}

/// Outcomes of the two independent sector decodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CssOutcome {
    /// Z-error estimate from the X syndrome (`H_X` checks).
    pub z_sector: DecodeOutcome,
    /// X-error estimate from the Z syndrome (`H_Z` checks).
    pub x_sector: DecodeOutcome,
}

/// Paired workspaces for decoding both sectors.
pub struct CssDecoder<'a> {
    pub z: SsfDecoder<'a>,
    pub x: SsfDecoder<'a>,
}

impl<'a> CssDecoder<'a> {
    pub fn new(catalogs: &'a CssCatalogs) -> Self {
        Self {
            z: SsfDecoder::new(&catalogs.z),
            x: SsfDecoder::new(&catalogs.x),
        }
    }

    pub fn get_mut(&mut self, sector: Sector) -> &mut SsfDecoder<'a> {
        match sector {
            Sector::Z => &mut self.z,
            Sector::X => &mut self.x,
        }
    }
}

/// Decodes the two sectors separately: `x_syndrome = H_X e_Z` and
/// `z_syndrome = H_Z e_X`.
pub fn decode_css(
    c: &CssCode,
    catalogs: &CssCatalogs,
    x_syndrome: &BitVector,
    z_syndrome: &BitVector,
) -> Result<CssOutcome> {
    for (s, m) in [(x_syndrome, c.hx()), (z_syndrome, c.hz())] {
        if s.len() != m.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: m.n_rows(),
                found: s.len(),
            });
        }
    }
    Ok(CssOutcome {
        z_sector: small_set_flip(&catalogs.z, x_syndrome)?,
        x_sector: small_set_flip(&catalogs.x, z_syndrome)?,
    })
}

/// Checks that would flag an error with this support.
#[cfg(test)]
pub(crate) fn syndrome_of(m: &crate::gf2::SparseBitMatrix, error: &BitVector) -> BitVector {
    m.mul_support(error.support())
}
