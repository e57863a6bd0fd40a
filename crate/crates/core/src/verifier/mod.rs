//! End-to-end verification of networks feeding a circuit.

mod dataset;
mod manifest;
mod query;
mod system;

pub use dataset::{verify_dataset, Aggregates, DatasetMode, Sample, VerificationReport, VerifyOptions};
pub use manifest::{
    dataset_from_json, dataset_to_json, load_dataset, load_system, BindingRef, CallRef, InputRef, Manifest,
    ManifestError, NetworkRef, DATASET_FORMAT, MANIFEST_FORMAT,
};
pub use query::{
    verify_sample, verify_sample_exact_symbolic, verify_with, QueryMode, SampleReport, Status,
    VerificationQuery,
};
pub use system::{
    digit_sum_system, driving_system, BindingEntry, InputSpec, LeafSource, NeSySystem, NetworkCall,
    SymbolicMethod, VerifyError, DRIVING_CONSTRAINT,
};
