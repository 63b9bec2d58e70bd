//! Almost periodic flexes represented by trigonometric velocity fields.

pub mod decision;
pub mod kernel;
pub mod trig;

pub use decision::{
    ap_flex_check, ap_rigidity_decision, ap_rigidity_from, decompose_by_spectrum_components,
    ApFlexReport, ApRigidity, ApVerdict, AtomCheck, ComponentPart, Witness,
};
pub use kernel::{
    bochner_fejer_kernel, expand_kernel, fejer_sequence, fejer_value, mean_convolution, stage_spec,
    FejerFactor, FejerKernelSpec, FejerTerm, KernelConfig,
};
pub use trig::{
    bohr_spectrum, epsilon_translation_test, extract_sampled, mean_against, mean_inner_product,
    phase_component_extract, trig_eval, BohrSpectrumReport, EpsilonTranslation, FrequencyAtom,
    TrigField,
};
