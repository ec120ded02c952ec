//! Small helper for vectors indexed by integers in `[-half, half]`.

/// A vector of length `2*half + 1` addressed by signed indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Centered<T> {
    half: i64,
    data: Vec<T>,
}

impl<T: Clone> Centered<T> {
    pub fn filled(half: i64, value: T) -> Self {
        assert!(half >= 0);
        Centered {
            half,
            data: vec![value; (2 * half + 1) as usize],
        }
    }
}

impl<T> Centered<T> {
    pub fn from_fn(half: i64, mut f: impl FnMut(i64) -> T) -> Self {
        assert!(half >= 0);
        let data = (-half..=half).map(&mut f).collect();
        Centered { half, data }
    }

    /// Wraps an existing vector; `data.len()` must be odd.
    pub fn from_vec(data: Vec<T>) -> Self {
        assert!(data.len() % 2 == 1, "centered vector needs odd length");
        let half = (data.len() / 2) as i64;
        Centered { half, data }
    }

    pub fn half(&self) -> i64 {
        self.half
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= -self.half && n <= self.half
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        -self.half..=self.half
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> std::ops::Index<i64> for Centered<T> {
    type Output = T;
    fn index(&self, n: i64) -> &T {
        assert!(self.contains(n), "index {} out of [-{}, {}]", n, self.half, self.half);
        &self.data[(n + self.half) as usize]
    }
}

impl<T> std::ops::IndexMut<i64> for Centered<T> {
    fn index_mut(&mut self, n: i64) -> &mut T {
        assert!(self.contains(n), "index {} out of [-{}, {}]", n, self.half, self.half);
        &mut self.data[(n + self.half) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let v = Centered::from_fn(3, |n| n * 2);
        assert_eq!(v.len(), 7);
        assert_eq!(v[-3], -6);
        assert_eq!(v[0], 0);
        assert_eq!(v[3], 6);
    }

    #[test]
    #[should_panic]
    fn out_of_range_panics() {
        let v = Centered::filled(2, 0.0f64);
        let _ = v[3];
    }
}
