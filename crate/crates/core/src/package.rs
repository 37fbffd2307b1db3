use crate::complex::{CacheStats, ComplexNumbers, TableMode, TableStats};
use crate::dd::{Node, NodeStore, UniqueTable};
use crate::error::{Error, Result};
use crate::ops::compute::ComputeTables;

/// Construction-time parameters of a [`Package`].
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Absolute tolerance under which two reals share a table entry.
    pub epsilon: f64,
    /// Number of buckets `N` of the real-value table; `N·2ε < 1` is required.
    pub real_buckets: usize,
    /// Largest number of qubits (decision variables) the package will see.
    pub max_qubits: usize,
    /// Unique-table insertions between garbage collections.
    pub gc_threshold: usize,
    /// The complex cache holds `cache_k · (max_qubits + 1)` values.
    pub cache_k: usize,
    /// Buckets per variable in each unique table (rounded up to a power of two).
    pub unique_buckets: usize,
    /// Slots per compute table (rounded up to a power of two).
    pub compute_slots: usize,
    pub table_mode: TableMode,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            epsilon: 1e-13,
            real_buckets: 65536,
            max_qubits: 64,
            gc_threshold: 131_072,
            cache_k: 16,
            unique_buckets: 32_768,
            compute_slots: 1 << 20,
            table_mode: TableMode::Bucketed,
        }
    }
}

impl Config {
    pub fn with_max_qubits(mut self, n: usize) -> Self {
        self.max_qubits = n;
        self
    }

    /// Small unique/compute tables; handy for tests that create many packages.
    pub fn compact() -> Self {
        Config {
            unique_buckets: 1024,
            compute_slots: 1 << 14,
            ..Config::default()
        }
    }
}

/// Counters exposed after each run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PackageStats {
    pub live_nodes: usize,
    pub peak_nodes: usize,
    pub unique_lookups: u64,
    pub unique_hits: u64,
    pub insertions: u64,
    pub gc_runs: u64,
    pub nodes_collected: u64,
    pub compute_lookups: u64,
    pub compute_hits: u64,
}

/// One decision-diagram package instance: complex table and cache, node
/// store, unique tables and compute tables. All state is instance-local.
#[derive(Debug)]
pub struct Package {
    pub(crate) config: Config,
    pub(crate) cn: ComplexNumbers,
    pub(crate) store: NodeStore,
    pub(crate) unique: [UniqueTable; 2],
    pub(crate) compute: ComputeTables,
    pub(crate) stats: PackageStats,
    pub(crate) insertions_since_gc: usize,
    /// Checked every few thousand recursive multiplications.
    pub(crate) deadline: Option<std::time::Instant>,
    pub(crate) ticks: u32,
}

impl Package {
    pub fn new(config: Config) -> Result<Self> {
        if config.max_qubits == 0 || config.max_qubits > u16::MAX as usize {
            return Err(Error::Config(format!(
                "max_qubits must be in 1..={}, got {}",
                u16::MAX,
                config.max_qubits
            )));
        }
        if config.cache_k == 0 {
            return Err(Error::Config("cache_k must be positive".into()));
        }
        let cache_capacity = config.cache_k * (config.max_qubits + 1);
        let cn = ComplexNumbers::new(
            config.epsilon,
            config.real_buckets,
            cache_capacity,
            config.table_mode,
        )?;
        let unique_buckets = config.unique_buckets.max(1).next_power_of_two();
        let compute_slots = config.compute_slots.max(1).next_power_of_two();
        Ok(Package {
            unique: [
                UniqueTable::new(config.max_qubits, unique_buckets),
                UniqueTable::new(config.max_qubits, unique_buckets),
            ],
            compute: ComputeTables::new(compute_slots),
            store: NodeStore::new(),
            cn,
            stats: PackageStats::default(),
            insertions_since_gc: 0,
            deadline: None,
            ticks: 0,
            config,
        })
    }

    /// Package for at most `n` qubits with otherwise default settings.
    pub fn with_qubits(n: usize) -> Result<Self> {
        Package::new(Config::default().with_max_qubits(n))
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn max_qubits(&self) -> usize {
        self.config.max_qubits
    }

    pub fn complex_numbers(&self) -> &ComplexNumbers {
        &self.cn
    }

    pub fn stats(&self) -> PackageStats {
        let mut s = self.stats;
        s.compute_lookups = self.compute.lookups();
        s.compute_hits = self.compute.hits();
        s
    }

    pub fn table_stats(&self) -> TableStats {
        self.cn.table_stats()
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cn.cache_stats()
    }

    pub fn live_nodes(&self) -> usize {
        self.stats.live_nodes
    }

    /// Live entries of the real-value table, including 0 and 1.
    pub fn live_reals(&self) -> usize {
        self.cn.live_entries()
    }

    /// Test hook: bypass the compute tables entirely.
    pub fn set_compute_tables_enabled(&mut self, enabled: bool) {
        self.compute.enabled = enabled;
    }

    pub(crate) fn node(&self, id: crate::dd::NodeId) -> &Node {
        self.store.get(id)
    }

    /// Runs `f` as one top-level operation: on error the complex cache is
    /// reset, on success it must be balanced.
    pub(crate) fn top_level<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let r = f(self);
        match r {
            Ok(v) => {
                debug_assert_eq!(self.cn.cache_in_use(), 0, "complex cache not balanced");
                if self.cn.cache_in_use() != 0 {
                    self.cn.reset_cache();
                    return Err(Error::Contract("complex cache not balanced".into()));
                }
                Ok(v)
            }
            Err(e) => {
                self.cn.reset_cache();
                Err(e)
            }
        }
    }
}
