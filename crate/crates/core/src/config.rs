/// Enumeration caps and execution settings shared by the verifier, the
/// certificate builder and the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Maximum number of dual codewords `q^(N-n)` enumerated per code.
    pub dual_cap: u128,
    /// Maximum number of size-`k` request multisets checked exhaustively.
    pub multiset_cap: u128,
    /// Maximum `|E|` (good simple tensors) walked by the greedy certificate.
    pub tensor_cap: u128,
    /// Maximum number of messages `q^n` enumerated for the minimum distance.
    pub codeword_cap: u128,
    /// Worker threads for multiset verification; `Some(1)` runs sequentially,
    /// `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            dual_cap: 1 << 20,
            multiset_cap: 1 << 22,
            tensor_cap: 1 << 20,
            codeword_cap: crate::code::DEFAULT_CODEWORD_CAP,
            threads: None,
            seed: 0,
        }
    }
}

impl Config {
    pub fn sequential() -> Self {
        Config {
            threads: Some(1),
            ..Config::default()
        }
    }
}
