use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;

use super::{variation_of, VariationConfig, VariationKind};
use crate::error::{Error, Result};
use crate::grid::{GridRegion, Point};
use crate::measures::{scaled, Class, Fun, InfinitySign, Meta, SetFunction};
use crate::value::{ExtendedValue, Rational};

/// A variation of a base function, usable as a set function in its own right.
///
/// Values are memoized per canonical region. In strict mode a value that did not stabilize
/// across the last two search levels is an error instead of a lower bound.
pub struct VariationFn {
    base: Fun,
    searched: Fun,
    kind: VariationKind,
    cfg: VariationConfig,
    strict: bool,
    meta: Meta,
    memo: Mutex<HashMap<GridRegion, (Rational, bool)>>,
    unstable: AtomicU64,
}

impl std::fmt::Debug for VariationFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VariationFn")
            .field("kind", &self.kind)
            .field("base", &self.base.meta().name)
            .field("level_cap", &self.cfg.level_cap)
            .finish()
    }
}

impl VariationFn {
    pub fn new(base: Fun, kind: VariationKind, cfg: VariationConfig) -> Self {
        let searched = match kind {
            VariationKind::Minus => {
                scaled(Rational::from_integer(-1), &base).expect("negating a valid function")
            }
            _ => base.clone(),
        };
        let meta = Meta {
            name: format!("{}({})", kind.symbol(), base.meta().name),
            claimed_class: Class::Dtm,
            support_window: base.meta().support_window,
            infinity_sign: InfinitySign::None,
        };
        VariationFn {
            base,
            searched,
            kind,
            cfg,
            strict: false,
            meta,
            memo: Mutex::new(HashMap::new()),
            unstable: AtomicU64::new(0),
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    /// Distinct regions evaluated so far whose value had not stabilized.
    pub fn unstable_count(&self) -> u64 {
        self.unstable.load(Ordering::Relaxed)
    }

    /// Value and stabilization flag for a region.
    pub fn value_with_flag(&self, r: &GridRegion) -> Result<(Rational, bool)> {
        let key = r.canonical();
        if let Some(v) = self.memo.lock().get(&key) {
            return Ok(*v);
        }
        let res = variation_of(&self.searched, &key, self.kind, &self.cfg)?;
        let v = res.value.as_finite().expect("searches over compacts are finite");
        let entry = (v, res.stabilized);
        let mut memo = self.memo.lock();
        if memo.len() >= crate::solid_extension::MEMO_LIMIT {
            memo.clear();
        }
        let fresh = memo.insert(key, entry).is_none();
        drop(memo);
        if fresh && !res.stabilized {
            self.unstable.fetch_add(1, Ordering::Relaxed);
        }
        Ok(entry)
    }
}

impl SetFunction for VariationFn {
    fn eval(&self, r: &GridRegion) -> Result<ExtendedValue> {
        if r.is_empty() {
            return Ok(ExtendedValue::ZERO);
        }
        let (v, stable) = self.value_with_flag(r)?;
        if self.strict && !stable {
            return Err(Error::VariationUnstable(r.clone()));
        }
        Ok(v.into())
    }

    fn meta(&self) -> &Meta {
        &self.meta
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn settled(&self, r: &GridRegion) -> Result<bool> {
        if r.is_empty() {
            return Ok(true);
        }
        Ok(self.value_with_flag(r)?.1)
    }

    fn atoms(&self) -> Vec<Point> {
        self.base.atoms()
    }

    fn diffuse_weight(&self) -> Rational {
        self.base.diffuse_weight()
    }
}
