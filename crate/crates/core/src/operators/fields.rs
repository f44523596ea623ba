use std::ops::{Index, IndexMut};

macro_rules! field {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn zeros(n: usize) -> Self {
                $name(vec![0.0; n])
            }

            pub fn from_vec(values: Vec<f64>) -> Self {
                $name(values)
            }

            pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
                $name((0..n).map(f).collect())
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn values(&self) -> &[f64] {
                &self.0
            }

            pub fn values_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn iter(&self) -> std::slice::Iter<'_, f64> {
                self.0.iter()
            }

            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
            }

            pub fn all_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }
        }

        impl Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl IndexMut<usize> for $name {
            fn index_mut(&mut self, i: usize) -> &mut f64 {
                &mut self.0[i]
            }
        }
    };
}

field!(
    /// One value per triangle.
    CellField
);
field!(
    /// One value per interior edge, in the edge's stored orientation.
    EdgeField
);
field!(
    /// One value per vertex.
    VertexField
);

impl EdgeField {
    /// Value read in the direction `sign * (stored orientation)`.
    pub fn along(&self, edge: usize, sign: f64) -> f64 {
        sign * self.0[edge]
    }
}
