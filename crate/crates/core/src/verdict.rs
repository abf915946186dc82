/// Outcome of a property check: the property holds iff no witness was found.
///
/// Checkers collect every violation they encounter rather than stopping at the
/// first one, so a failing verdict lists all offending records in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<W> {
    witnesses: Vec<W>,
}

impl<W> Verdict<W> {
    pub fn from_witnesses(witnesses: Vec<W>) -> Self {
        Self { witnesses }
    }

    pub fn ok() -> Self {
        Self {
            witnesses: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witnesses(&self) -> &[W] {
        &self.witnesses
    }

    pub fn into_witnesses(self) -> Vec<W> {
        self.witnesses
    }
}

impl<W> Default for Verdict<W> {
    fn default() -> Self {
        Self::ok()
    }
}

impl<W> FromIterator<W> for Verdict<W> {
    fn from_iter<I: IntoIterator<Item = W>>(iter: I) -> Self {
        Self::from_witnesses(iter.into_iter().collect())
    }
}
