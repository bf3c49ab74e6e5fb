"""Graph signal processing toolkit: diffusion-wavelet scattering operators,
a hybrid band-pass/low-pass node classification model, and a verification
lab for the analytic filter-response claims the design rests on."""

from .graphs import (
    Graph,
    build_graph,
    make_bipartite_regular,
    make_chained_cycles,
    make_cyclic,
)
from .operators import (
    DiffusionPlan,
    apply_lowpass,
    apply_power,
    apply_wavelet,
    gcn_filter,
    lazy_walk,
    nonlazy_walk,
    renorm_propagation,
    residual_conv,
    residual_plan,
    wavelet_filter_bank,
)
from .spectral import (
    SpectralDecomposition,
    decompose,
    fourier,
    inverse_fourier,
    normalized_laplacian,
    poly_filter,
    poly_filter_spectral,
)
from .scattering import parse_path, scatter_graph_moments, scatter_node
from .network import (
    GcnChannel,
    ModelParams,
    ModelSpec,
    ScatteringChannel,
    TrainConfig,
    TrainingDiverged,
    ablate_channel,
    backward,
    evaluate,
    forward,
    init_params,
    load_checkpoint,
    loss_masked_ce,
    save_checkpoint,
    train,
)
from .lemmalab import (
    LemmaReport,
    default_sweep,
    verify_fig3_table,
    verify_hub_pass,
    verify_lemma1,
    verify_lemma2,
)
from .data_io import (
    Dataset,
    RunConfig,
    load_config,
    load_dataset,
    load_preset,
    save_config,
    save_dataset,
)

__version__ = "0.1.0"
