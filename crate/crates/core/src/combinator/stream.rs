use std::fmt;
use std::sync::Arc;

use crate::form::Form;

/// An immutable token sequence with a cursor.
///
/// Cloning is cheap: the tokens are shared and only the position is copied.
/// Advancing returns a new stream and leaves `self` untouched.
#[derive(Clone, PartialEq, Eq)]
pub struct TokenStream {
    source: Arc<[Form]>,
    position: usize,
}

impl TokenStream {
    pub fn new(tokens: impl Into<Arc<[Form]>>) -> Self {
        TokenStream {
            source: tokens.into(),
            position: 0,
        }
    }

    /// A stream of character forms, one per scalar value.
    pub fn from_chars(text: &str) -> Self {
        TokenStream::new(Form::chars(text))
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn is_exhausted(&self) -> bool {
        self.position >= self.source.len()
    }

    pub fn peek(&self) -> Option<&Form> {
        self.source.get(self.position)
    }

    pub fn remaining(&self) -> &[Form] {
        &self.source[self.position..]
    }

    pub fn tokens(&self) -> &[Form] {
        &self.source
    }

    /// Moves the cursor forward by `n`, clamped to the end of the source.
    pub fn advance(&self, n: usize) -> TokenStream {
        TokenStream {
            source: Arc::clone(&self.source),
            position: (self.position + n).min(self.source.len()),
        }
    }

    /// Same source, cursor at `position` (clamped).
    pub fn at(&self, position: usize) -> TokenStream {
        TokenStream {
            source: Arc::clone(&self.source),
            position: position.min(self.source.len()),
        }
    }
}

impl fmt::Debug for TokenStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TokenStream@{}[", self.position)?;
        for (i, t) in self.remaining().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

impl From<Vec<Form>> for TokenStream {
    fn from(tokens: Vec<Form>) -> Self {
        TokenStream::new(tokens)
    }
}
