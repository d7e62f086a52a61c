use crate::linalg::Matrix;

/// Non-overlapping max pooling over time; trailing steps that do not fill a
/// whole window are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxPool1DLayer {
    pub pool_width: usize,
}

/// For each output step and channel, the input step holding the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolCache {
    input_len: usize,
    channels: usize,
    argmax: Vec<Vec<usize>>,
}

impl PoolCache {
    pub fn argmax(&self) -> &[Vec<usize>] {
        &self.argmax
    }
}

impl MaxPool1DLayer {
    pub fn new(pool_width: usize) -> Self {
        assert!(pool_width >= 1, "pool width must be positive");
        Self { pool_width }
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        input_len / self.pool_width
    }

    pub fn forward(&self, seq: &[Matrix]) -> (Vec<Matrix>, PoolCache) {
        let channels = seq.first().map_or(0, |x| x.rows());
        let out_len = self.output_len(seq.len());
        let mut out = Vec::with_capacity(out_len);
        let mut argmax = Vec::with_capacity(out_len);
        for w in 0..out_len {
            let start = w * self.pool_width;
            let mut best = seq[start].as_slice().to_vec();
            let mut where_ = vec![start; channels];
            for (t, x) in seq
                .iter()
                .enumerate()
                .skip(start + 1)
                .take(self.pool_width - 1)
            {
                for (c, &v) in x.as_slice().iter().enumerate() {
                    // strict comparison keeps the first index on ties
                    if v > best[c] {
                        best[c] = v;
                        where_[c] = t;
                    }
                }
            }
            out.push(Matrix::column(best));
            argmax.push(where_);
        }
        let cache = PoolCache {
            input_len: seq.len(),
            channels,
            argmax,
        };
        (out, cache)
    }

    pub fn backward(&self, cache: &PoolCache, d_out: &[Matrix]) -> Vec<Matrix> {
        assert_eq!(d_out.len(), cache.argmax.len(), "pool upstream length");
        let mut d_in = vec![Matrix::zeros(cache.channels.max(1), 1); cache.input_len];
        for (d, where_) in d_out.iter().zip(&cache.argmax) {
            for (c, (&t, &g)) in where_.iter().zip(d.as_slice()).enumerate() {
                d_in[t].as_mut_slice()[c] += g;
            }
        }
        d_in
    }
}
