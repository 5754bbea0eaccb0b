"""
Project-wide numerical constants.

Centralizes the magic numbers shared by the NUFFT, density compensation,
metrics and file formats so every module reads them from one place.
"""

# ===== NUFFT =====

DEFAULT_OVERSAMPLING = 2.0  # Oversampled grid factor sigma
DEFAULT_KERNEL_WIDTH = 6  # Kaiser-Bessel taps per axis (J)
MIN_OVERSAMPLING = 1.25
MIN_KERNEL_WIDTH = 2
KERNEL_TABLE_RESOLUTION = 2 ** 10  # Table entries per unit of grid distance
NDFT_CHUNK_SIZE = 256  # Samples evaluated per block by the exact oracle
NUFFT_NORMS = ("backward", "ortho")  # "ortho" scales forward and adjoint by 1/sqrt(H*W)

# ===== Trajectories =====

SPIRAL_MAX_RADIUS = 0.4999  # Keeps the t -> 1 limit inside the half-open box
SPIRAL_DEFAULT_TURNS = 0.5

# ===== Density compensation =====

DEFAULT_DC_ITERATIONS = 10
DC_SINGULARITY_THRESHOLD = 1e-12  # Below this |G G^H d| is treated as singular
DC_KERNEL_WIDTH = 3  # Kaiser-Bessel taps per axis of the density Gram, in oversampled grid nodes

# ===== Unrolled model =====

DEFAULT_UNROLLED_ITERATIONS = 10  # K
DEFAULT_BUFFER_SIZE = 5  # B
DEFAULT_FILTERS = 16  # C, hidden channels of the correction CNN
DEFAULT_STEP_SIZE = 0.1  # Initial tau of the gradient-step correction
CONV_KERNEL_SIZE = 3

# ===== Training =====

DEFAULT_LEARNING_RATE = 1e-4
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
COMPOUND_LOSS_ALPHA = 0.98

# ===== Metrics =====

SSIM_WINDOW = 7
SSIM_K1 = 0.01
SSIM_K2 = 0.03
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)

# ===== Phantoms =====

MIN_PHANTOM_SIZE = 16
PNG_WINDOW_PERCENTILES = (0.1, 99.9)

# ===== File formats =====

IMAGE_MAGIC = b"NCIM"
TENSOR_MAGIC = b"NCWT"
FORMAT_VERSION = 1

# ===== Logging =====

LOG_LEVEL_DEFAULT = "INFO"
