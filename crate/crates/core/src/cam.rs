//! Bit-level functional model of one acceleration module: a CAM holding
//! vector indices juxtaposed with a RAM holding the matching values.
//!
//! Each stored bit is logical. The complementary memristor of a resistive
//! CAM cell carries no extra information and is not modeled. Compare is
//! evaluated for every row at once: a row's match line stays asserted only
//! when all of its unmasked bits equal the key, and the asserted match line
//! drives the word line of the RAM row next to it.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CamError {
    #[error("segment of {len} entries does not fit in {height} rows; tile the vector")]
    Overflow { len: usize, height: usize },
    #[error("index {0} loaded twice")]
    DuplicateIndex(u64),
    #[error("index {index} does not fit in {width} bits")]
    IndexTooWide { index: u64, width: u32 },
    #[error("rows {0:?} all match the key; stored indices are no longer unique")]
    MultipleMatch(Vec<usize>),
    #[error("endurance budget must be positive")]
    ZeroBudget,
    #[error("invalid array geometry: {0}")]
    Geometry(String),
    #[error("dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

/// Energy events recorded by one array.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnergyTally {
    /// Bit comparisons: every row compares every unmasked bit on each compare.
    pub compare_bit_ops: u64,
    pub ram_reads: u64,
    pub writes: u64,
}

impl std::ops::AddAssign for EnergyTally {
    fn add_assign(&mut self, o: Self) {
        self.compare_bit_ops += o.compare_bit_ops;
        self.ram_reads += o.ram_reads;
        self.writes += o.writes;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamRow {
    pub index_bits: u64,
    pub value: f64,
    pub valid: bool,
}

impl Default for CamRow {
    fn default() -> Self {
        CamRow {
            index_bits: 0,
            value: 0.0,
            valid: false,
        }
    }
}

/// Search key placed in the INDEX register. Mask bits set to 1 are compared,
/// 0 bits are left floating and match anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareKey {
    pub key_bits: u64,
    pub mask: u64,
}

impl CompareKey {
    /// Key comparing all `width` bits.
    pub fn exact(key_bits: u64, width: u32) -> Self {
        CompareKey {
            key_bits,
            mask: width_mask(width),
        }
    }

    /// Parses a pattern such as `01X1`, most significant bit first; `X` masks a bit.
    pub fn from_pattern(pattern: &str) -> Option<Self> {
        if pattern.is_empty() || pattern.len() > 64 {
            return None;
        }
        let (mut key_bits, mut mask) = (0u64, 0u64);
        for ch in pattern.chars() {
            key_bits <<= 1;
            mask <<= 1;
            match ch {
                '0' => mask |= 1,
                '1' => {
                    key_bits |= 1;
                    mask |= 1;
                }
                'x' | 'X' => {}
                _ => return None,
            }
        }
        Some(CompareKey { key_bits, mask })
    }
}

pub(crate) fn width_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CamRamArray {
    height: usize,
    index_width: u32,
    rows: Vec<CamRow>,
    write_count: Vec<u64>,
    energy: EnergyTally,
    // Functional shortcut for full-width compares; holds every valid row
    // only while stored indices are unique.
    lookup: HashMap<u64, usize>,
    lookup_complete: bool,
}

impl CamRamArray {
    pub fn new(height: usize, index_width: u32) -> Result<Self, CamError> {
        if height == 0 {
            return Err(CamError::Geometry("height must be at least 1".into()));
        }
        if !(1..=64).contains(&index_width) {
            return Err(CamError::Geometry(format!(
                "index width {index_width} outside 1..=64"
            )));
        }
        Ok(CamRamArray {
            height,
            index_width,
            rows: vec![CamRow::default(); height],
            write_count: vec![0; height],
            energy: EnergyTally::default(),
            lookup: HashMap::new(),
            lookup_complete: true,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn index_width(&self) -> u32 {
        self.index_width
    }

    pub fn rows(&self) -> &[CamRow] {
        &self.rows
    }

    pub fn write_count(&self) -> &[u64] {
        &self.write_count
    }

    pub fn max_write_count(&self) -> u64 {
        self.write_count.iter().copied().max().unwrap_or(0)
    }

    pub fn energy(&self) -> EnergyTally {
        self.energy
    }

    pub fn valid_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.valid).count()
    }

    /// Initialization: writes `entries` into rows `0..len` and invalidates the rest.
    ///
    /// The segment is checked in full before anything is written, so a
    /// rejected load leaves the array untouched.
    pub fn load_segment(&mut self, entries: &[(u64, f64)]) -> Result<(), CamError> {
        if entries.len() > self.height {
            return Err(CamError::Overflow {
                len: entries.len(),
                height: self.height,
            });
        }
        let limit = width_mask(self.index_width);
        let mut seen: Vec<u64> = Vec::with_capacity(entries.len());
        for &(index, _) in entries {
            if index > limit {
                return Err(CamError::IndexTooWide {
                    index,
                    width: self.index_width,
                });
            }
            seen.push(index);
        }
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CamError::DuplicateIndex(w[0]));
        }

        self.lookup.clear();
        self.lookup_complete = true;
        for (row, &(index, value)) in entries.iter().enumerate() {
            self.lookup.insert(index, row);
            self.rows[row] = CamRow {
                index_bits: index,
                value,
                valid: true,
            };
            self.write_count[row] += 1;
        }
        for row in &mut self.rows[entries.len()..] {
            row.valid = false;
        }
        self.energy.writes += entries.len() as u64;
        Ok(())
    }

    /// Parallel masked compare across all rows.
    ///
    /// Returns the matching row, `None` when no valid row matches, or
    /// [`CamError::MultipleMatch`] if more than one row does.
    pub fn compare_select(&mut self, key: CompareKey) -> Result<Option<usize>, CamError> {
        let mask = key.mask & width_mask(self.index_width);
        self.energy.compare_bit_ops += self.height as u64 * u64::from(mask.count_ones());
        if self.lookup_complete && mask == width_mask(self.index_width) {
            return Ok(self.lookup.get(&(key.key_bits & mask)).copied());
        }
        let mut hits = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.valid && (r.index_bits ^ key.key_bits) & mask == 0)
            .map(|(i, _)| i);
        let first = hits.next();
        match hits.next() {
            None => Ok(first),
            Some(second) => {
                let mut all = vec![first.unwrap(), second];
                all.extend(hits);
                Err(CamError::MultipleMatch(all))
            }
        }
    }

    /// Search-and-read: the value stored under `index`, or exactly `0.0` on a miss.
    pub fn search_and_read(&mut self, index: u64) -> f64 {
        let in_range = index <= width_mask(self.index_width);
        let key = CompareKey::exact(index, self.index_width);
        // A full-width key can only hit one row because load_segment keeps indices unique.
        match self.compare_select(key) {
            Ok(Some(row)) if in_range => {
                self.energy.ram_reads += 1;
                self.rows[row].value
            }
            Ok(_) => 0.0,
            Err(e) => unreachable!("full-width compare: {e}"),
        }
    }

    /// Fraction of the per-row write budget still unused by the most-written row.
    pub fn endurance_headroom(&self, budget: u64) -> Result<f64, CamError> {
        if budget == 0 {
            return Err(CamError::ZeroBudget);
        }
        Ok((1.0 - self.max_write_count() as f64 / budget as f64).max(0.0))
    }

    /// Text dump of the valid rows: `row<TAB>index-bits<TAB>value`, bits most
    /// significant first and padded to the index width.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rows.iter().enumerate().filter(|(_, r)| r.valid) {
            let _ = writeln!(
                out,
                "{i}\t{:0width$b}\t{}",
                r.index_bits,
                r.value,
                width = self.index_width as usize
            );
        }
        out
    }

    /// Builds an array from a [`dump`](Self::dump) listing. Rows not listed
    /// stay invalid; each listed row counts one write. Unlike `load_segment`
    /// this accepts duplicate indices, so fixtures can reproduce a corrupted array.
    pub fn from_dump(height: usize, index_width: u32, text: &str) -> Result<Self, CamError> {
        let mut arr = CamRamArray::new(height, index_width)?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| CamError::Dump {
                line: n + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err("expected 'row bits value'"));
            }
            let row: usize = f[0].parse().map_err(|_| err("bad row number"))?;
            if row >= height {
                return Err(err("row outside array height"));
            }
            if f[1].len() != index_width as usize {
                return Err(err("bit string length differs from index width"));
            }
            let bits = u64::from_str_radix(f[1], 2).map_err(|_| err("bad bit string"))?;
            let value: f64 = f[2].parse().map_err(|_| err("bad value"))?;
            if let Some(old) = arr.rows[row].valid.then_some(arr.rows[row].index_bits) {
                arr.lookup.remove(&old);
            }
            if arr.lookup.insert(bits, row).is_some() {
                arr.lookup_complete = false;
            }
            arr.rows[row] = CamRow {
                index_bits: bits,
                value,
                valid: true,
            };
            arr.write_count[row] += 1;
            arr.energy.writes += 1;
        }
        Ok(arr)
    }
}
