from hypothesis import settings

from spdcfc import ExperimentConfig, WalkOffSet

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")

# Reference design point used throughout: 415 nm pumped type-II BBO,
# 3.5 deg cones, MFD 4.2 um fiber imaged at mu ~ 49.
REFERENCE_WALKOFFS = WalkOffSet(m_p=0.07631, m=0.07243, q_over_k=0.036215)


def reference_config(length_um: float = 3000.0) -> ExperimentConfig:
    return ExperimentConfig(
        crystal_length=length_um,
        pump_waist=53.0,
        fiber_mode_radius=1.48,
        inverse_magnification=49.0,
        walkoffs=REFERENCE_WALKOFFS,
    )
