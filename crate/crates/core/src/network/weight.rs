//! Positive-number arithmetic for elimination, in plain doubles or in logarithms.

pub(crate) trait Weight: Copy + std::fmt::Debug {
    fn from_log(l: f64) -> Self;
    fn log(self) -> f64;
    fn add(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Self;
    /// `self / o` as a double; used where the quotient lies in `[0, 1]`.
    fn ratio(self, o: Self) -> f64;
}

impl Weight for f64 {
    #[inline]
    fn from_log(l: f64) -> f64 {
        l.exp()
    }
    #[inline]
    fn log(self) -> f64 {
        self.ln()
    }
    #[inline]
    fn add(self, o: f64) -> f64 {
        self + o
    }
    #[inline]
    fn mul(self, o: f64) -> f64 {
        self * o
    }
    #[inline]
    fn div(self, o: f64) -> f64 {
        self / o
    }
    #[inline]
    fn ratio(self, o: f64) -> f64 {
        self / o
    }
}

/// A positive number held as its natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LogW(pub f64);

impl Weight for LogW {
    #[inline]
    fn from_log(l: f64) -> LogW {
        LogW(l)
    }
    #[inline]
    fn log(self) -> f64 {
        self.0
    }
    #[inline]
    fn add(self, o: LogW) -> LogW {
        let (hi, lo) = if self.0 >= o.0 { (self.0, o.0) } else { (o.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogW(hi);
        }
        LogW(hi + (lo - hi).exp().ln_1p())
    }
    #[inline]
    fn mul(self, o: LogW) -> LogW {
        LogW(self.0 + o.0)
    }
    #[inline]
    fn div(self, o: LogW) -> LogW {
        LogW(self.0 - o.0)
    }
    #[inline]
    fn ratio(self, o: LogW) -> f64 {
        (self.0 - o.0).exp()
    }
}
