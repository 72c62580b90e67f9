use std::collections::BTreeMap;

use super::{
    ApproxMultiValuedIpf, DetConstSort, ExactFairDcg, MallowsRanker, Ranker, RankerConfig,
    WeaklyFairCenter,
};
use crate::error::{Error, Result};

pub type RankerFactory = fn(&RankerConfig) -> Result<Box<dyn Ranker>>;

/// Name -> factory map used to pick a ranker at runtime.
#[derive(Clone, Default)]
pub struct RankerRegistry {
    factories: BTreeMap<String, RankerFactory>,
}

impl RankerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every ranker in this crate.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(MallowsRanker::NAME, |c| {
            Ok(Box::new(MallowsRanker::new(c.theta, c.samples, c.criterion)?.with_center(c.center)))
        });
        r.register(ExactFairDcg::NAME, |c| Ok(Box::new(ExactFairDcg::with_noise(c.sigma)?)));
        r.register(DetConstSort::NAME, |c| Ok(Box::new(DetConstSort::with_noise(c.sigma)?)));
        r.register(ApproxMultiValuedIpf::NAME, |c| {
            Ok(Box::new(ApproxMultiValuedIpf::with_noise(c.sigma)?))
        });
        r.register(WeaklyFairCenter::NAME, |_| Ok(Box::new(WeaklyFairCenter)));
        r
    }

    pub fn register(&mut self, name: impl Into<String>, factory: RankerFactory) {
        self.factories.insert(name.into(), factory);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, config: &RankerConfig) -> Result<Box<dyn Ranker>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownAlgorithm(name.to_string()))?;
        factory(config)
    }
}

impl std::fmt::Debug for RankerRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}
