"""Two-level fractional factorial designs built from quaternary codes.

The package constructs one-eighth and one-sixteenth fractions from Z4
generator data, computes their aliasing spectra and derived metrics both by
closed-form theory and by brute force, and searches the profile space for
designs with maximum resolution, minimum aberration, or maximum
projectivity.  All metric arithmetic is exact.
"""

from .qc_core import (
    DesignMatrix,
    Family,
    FrequencyTable,
    GeneratorProfile,
    GeneratorSpec,
    build_design,
    column_labels,
    frequencies,
    profile_from_frequencies,
    profile_of,
    realize_profile,
    spec_for,
)
from .spectrum import (
    UNBOUNDED,
    DesignMetrics,
    Unbounded,
    WordEntry,
    WordSpectrum,
    spectrum_metrics,
)
from .oracle import (
    JTable,
    SubsetType,
    character_sum_even,
    character_sum_odd,
    classify_subset,
    j_characteristics,
    j_direct,
    metrics,
    projection_level_full,
    projectivity,
    spectrum_bruteforce,
)
from .theory import (
    AliasingConstants,
    LengthOffsets,
    NoClosedFormBound,
    WordClassReport,
    aliasing_constants,
    eighth_even_spectrum,
    eighth_odd_spectrum,
    family_spectrum,
    length_offsets,
    projectivity_bound,
    sixteenth_even_spectrum,
    sixteenth_odd_spectrum,
    words_by_type,
)
from .search import (
    Criterion,
    SearchResult,
    enumerate_profiles,
    optimize,
    orthogonal_array_ceiling,
    reproduce_table,
)

__version__ = "0.1.0"
