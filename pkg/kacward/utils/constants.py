DEFAULT_BRUTE_MAX_N = 5
BRUTE_MAX_N_ENV_VAR = 'KACWARD_BRUTE_MAX_N'
BRUTE_FORCE_CHUNK_SIZE = 1 << 20

# even-subgraph enumeration
SUBSET_SCAN_MAX_BONDS = 24
MAX_CYCLE_SPACE_DIM = 20

# closed path enumeration
DEFAULT_MAX_PATH_LEN = 16

# quadrature
DEFAULT_QUAD_RES = 128
MAX_QUAD_RES = 2048
DEFAULT_QUAD_TOL = 1e-13
IMAGINARY_RESIDUE_TOL = 1e-12
# det(I - uM) at or below this is the critical node
SINGULAR_DET_TOL = 1e-14

# onsager
CRITICAL_NUDGE = 1e-9
CRITICAL_NUDGE_WINDOW = 1e-8
NEAR_CRITICAL_WINDOW = 1e-2
AGM_TOL = 1e-15
AGM_MAX_ITER = 64
# sqrt(1 - k1^2) at or below this is the critical point
CRITICAL_MODULUS_TOL = 1e-15
DEFAULT_SERIES_TERMS = 400
# 4|k| within this of 1 counts as the critical point
SERIES_DOMAIN_TOL = 1e-12

# output
CSV_HEADER = ('K', 'u', 'k1', 'minus_beta_f', 'U_over_J', 'C_over_kB')
CSV_FLOAT_FORMAT = '%.12e'
