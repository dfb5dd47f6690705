use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The image has no object pixel.
    EmptyImage,
    DimensionMismatch { expected: usize, found: usize },
    EmptyDataset,
    /// A class label outside `0..NUM_CLASSES` (or outside the model's head).
    BadLabel(usize),
    /// Binary SVM training needs both labels, multiclass at least two classes.
    SingleClassData,
    NonPositiveC(f64),
    EmptyGrid,
    EmptySelection,
    AllZeroAccuracies,
    InvalidWeights,
    InvalidConfig(&'static str),
    InvalidImage(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyImage => write!(f, "image contains no object pixel"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyDataset => write!(f, "dataset is empty"),
            Error::BadLabel(l) => write!(f, "class label {l} out of range"),
            Error::SingleClassData => write!(f, "training data contains a single class"),
            Error::NonPositiveC(c) => write!(f, "soft margin parameter must be positive, got {c}"),
            Error::EmptyGrid => write!(f, "parameter grid is empty"),
            Error::EmptySelection => write!(f, "selection set is empty"),
            Error::AllZeroAccuracies => write!(f, "all expert accuracies are zero"),
            Error::InvalidWeights => write!(f, "fusion weights must be non-negative and sum to 1"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidImage(msg) => write!(f, "invalid image: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
