"""Declared numeric policy for the whole package.

Every statistical gate, guard and discretization default lives here so that
test verdicts are reproducible from one file. Tests may not override these
silently; experiment configs can widen sampling sizes but not the gates.
"""

# --- statistical gates -------------------------------------------------------

Z_MAX = 3.0                  # |z| gate for variance / cross-term style tests
KS_P_MIN = 0.01              # KS p-value gate for normality_test
KURT_Z_MAX = 3.0             # kurtosis gate in combined-SE units
ECF_LEVEL = 0.99             # bootstrap level for the uniform ECF band
ECF_BOOTSTRAP = 600          # bootstrap resamples for the ECF band
ECF_THETA_POINTS = 13        # symmetric grid on [-3/sigma_hat, 3/sigma_hat]
CV_MAX = 0.10                # final coefficient of variation, concentration (d>=3)

MIN_REPLICAS_VARIANCE = 200
MIN_REPLICAS_ECF = 1000
MIN_REPLICAS_NORMALITY = 1000
MIN_REPLICAS_KURTOSIS = 2000

ECF_BOOTSTRAP_SEED = 190751  # fixed stream so ECF verdicts rerun bitwise
MOMENT_GAP_EXPONENTS = (1, 2, 3, 4, 5, 6)  # increment gaps 2^-e for slope fits

# --- model validation --------------------------------------------------------

EPS_BOCHNER_REL = 1e-8       # spectrum may not dip below -EPS_BOCHNER_REL * R(0)
DEGENERATE_REL = 1e-10       # degenerate flag: |R_hat(0)| <= DEGENERATE_REL * R(0)
ALPHA_FIT_DECADE = (1e-3, 1e-2)   # |xi| decade for the small-frequency power fit
ALPHA_MARGIN = 0.05          # fitted alpha must clear the bound by this margin
ALPHA_MIN = {1: 1.0, 2: 0.0}  # integrability bound on R_hat(xi) ~ |xi|^alpha

# --- discretization defaults -------------------------------------------------

KAPPA = 10                   # step policy: delta = (support_radius / KAPPA)^2
TIME_GRID_DEN = 64           # trajectory times, probes and windows use k/64
GRID_CELLS_SWITCH = 2 ** 22  # grid-field cell budget before feature sampling
LOCAL_TIME_BIN_FRACTION = 1.0 / 8.0   # bin width = support_radius / 8
GRID_SPACING_FRACTION = 1.0 / 16.0    # field grid h = support_radius / 16
GRID_SPACING_MAX_FRACTION = 1.0 / 8.0  # precondition: h <= support_radius / 8
SPECTRUM_TABLE_POINTS = 512  # tabulated spectra: spacing support_radius/512
SPECTRUM_PAD_FACTOR = 8      # zero padding factor before the FFT
CLAMP_MASS_MAX = 1e-6        # circulant eigenvalue clamp diagnostic gate
EMBED_RETRIES = 3            # padding doublings before giving up

# --- quadrature --------------------------------------------------------------

QUAD_REL = 1e-8              # relative tolerance for oracle quadratures
QUAD_GUARD_REL = 1e-5        # reject oracle values whose error bound is worse
SIGMA_DUAL_REL = 1e-6        # agreement required between the two sigma routes

# --- resource guards ---------------------------------------------------------

GRID_CELLS_MAX = 2 ** 30     # refuse denser field grids (suggest feature sampler)
PATH_STEPS_MAX = 10 ** 9     # refuse longer paths
POISSON_POINTS_MAX = 10 ** 9  # refuse windows with more expected points
POISSON_FULL_WINDOW_MAX = 2 * 10 ** 6  # engine switches to restricted sampling above
