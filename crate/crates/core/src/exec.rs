//! Execution policy for the data-parallel kernels.
//!
//! Every hot loop in the crate (per-component transforms, pointwise wedge
//! products, Γ-word enumeration) goes through [`Exec::map`]. With the
//! `parallel` feature enabled the default policy fans out over rayon's global
//! pool; without it, or with [`Exec::Sequential`], the same closures run in
//! order on the calling thread. Results are always returned in input order, so
//! reductions downstream stay deterministic regardless of policy.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.into_iter().map(f).collect(),
            Exec::Parallel => par_map(items, f),
        }
    }

    /// Apply `f` to every element of `items` in place.
    pub fn for_each_mut<T, F>(self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(&mut T) + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter_mut().for_each(f),
            Exec::Parallel => par_for_each_mut(items, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, R: Send, F: Fn(T) -> R + Sync + Send>(items: Vec<T>, f: F) -> Vec<R> {
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Send, R: Send, F: Fn(T) -> R + Sync + Send>(items: Vec<T>, f: F) -> Vec<R> {
    items.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn par_for_each_mut<T: Send, F: Fn(&mut T) + Sync + Send>(items: &mut [T], f: F) {
    use rayon::prelude::*;
    items.par_iter_mut().for_each(f)
}

#[cfg(not(feature = "parallel"))]
fn par_for_each_mut<T: Send, F: Fn(&mut T) + Sync + Send>(items: &mut [T], f: F) {
    items.iter_mut().for_each(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_preserve_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(xs.clone(), |x| x * x + 1);
        let b = Exec::Parallel.map(xs, |x| x * x + 1);
        assert_eq!(a, b);
    }
}
