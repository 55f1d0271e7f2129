use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{Closure, Lambda, Value};

/// A chain of immutable frames. Extending an environment allocates a new
/// frame; existing frames are never modified.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<Frame>>);

struct Frame {
    bindings: Bindings,
    parent: Env,
}

enum Bindings {
    Values(HashMap<String, Value>),
    /// Mutually recursive functions. Looking one up closes it over this very
    /// frame, so the frame never has to contain itself.
    Recursive(HashMap<String, Arc<Lambda>>),
}

impl Env {
    pub fn empty() -> Self {
        Env(None)
    }

    pub fn extend(&self, bindings: impl IntoIterator<Item = (String, Value)>) -> Env {
        Env(Some(Arc::new(Frame {
            bindings: Bindings::Values(bindings.into_iter().collect()),
            parent: self.clone(),
        })))
    }

    pub fn extend_recursive(&self, functions: impl IntoIterator<Item = (String, Arc<Lambda>)>) -> Env {
        Env(Some(Arc::new(Frame {
            bindings: Bindings::Recursive(functions.into_iter().collect()),
            parent: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<Value> {
        let mut current = self;
        while let Some(frame) = &current.0 {
            match &frame.bindings {
                Bindings::Values(values) => {
                    if let Some(v) = values.get(name) {
                        return Some(v.clone());
                    }
                }
                Bindings::Recursive(functions) => {
                    if let Some(lambda) = functions.get(name) {
                        return Some(Value::Closure(Closure {
                            lambda: Arc::clone(lambda),
                            env: current.clone(),
                        }));
                    }
                }
            }
            current = &frame.parent;
        }
        None
    }

    pub(crate) fn same_frame(&self, other: &Env) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Number of frames in the chain.
    pub fn depth(&self) -> usize {
        let mut n = 0;
        let mut current = self;
        while let Some(frame) = &current.0 {
            n += 1;
            current = &frame.parent;
        }
        n
    }

    /// Names bound in the innermost frame, sorted.
    pub fn local_names(&self) -> Vec<String> {
        let mut names: Vec<String> = match &self.0 {
            None => Vec::new(),
            Some(frame) => match &frame.bindings {
                Bindings::Values(v) => v.keys().cloned().collect(),
                Bindings::Recursive(f) => f.keys().cloned().collect(),
            },
        };
        names.sort();
        names
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Env(depth {}, {:?})", self.depth(), self.local_names())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::Number;

    fn num(n: i64) -> Value {
        Value::Number(Number::integer(n))
    }

    #[test]
    fn lookup_walks_parents_and_shadows() {
        let outer = Env::empty().extend([("x".to_string(), num(1)), ("y".to_string(), num(2))]);
        let inner = outer.extend([("x".to_string(), num(10))]);
        assert_eq!(inner.lookup("x"), Some(num(10)));
        assert_eq!(inner.lookup("y"), Some(num(2)));
        assert_eq!(outer.lookup("x"), Some(num(1)));
        assert_eq!(inner.lookup("z"), None);
        assert_eq!(inner.depth(), 2);
    }
}
