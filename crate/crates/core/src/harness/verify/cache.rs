//! Process-wide memo of simulated batches, so targets sharing a
//! configuration (several read the same excursion batch) simulate it once.

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;

type Slot = Arc<Mutex<Option<Arc<dyn Any + Send + Sync>>>>;

fn slots() -> &'static Mutex<HashMap<String, Slot>> {
    static SLOTS: OnceLock<Mutex<HashMap<String, Slot>>> = OnceLock::new();
    SLOTS.get_or_init(Default::default)
}

/// Value for `key`, computing it at most once at a time. Concurrent callers
/// with the same key wait for the first; failures are not cached.
pub(super) fn cached<T, F>(key: String, compute: F) -> Result<Arc<T>>
where
    T: Send + Sync + 'static,
    F: FnOnce() -> Result<T>,
{
    let slot = slots().lock().unwrap().entry(key).or_default().clone();
    let mut guard = slot.lock().unwrap();
    if let Some(v) = guard.as_ref() {
        if let Ok(v) = v.clone().downcast::<T>() {
            return Ok(v);
        }
    }
    let value = Arc::new(compute()?);
    *guard = Some(value.clone());
    Ok(value)
}

/// Drop every memoized batch.
pub fn clear_cache() {
    slots().lock().unwrap().clear();
}
