""" column orders, environment keys and exit codes """
__all__ = [
    'SEED_ENV_VAR',
    'EXIT_OK',
    'EXIT_CONFIG',
    'EXIT_INFEASIBLE',
    'EXIT_NUMERIC',
    'SNR_DEFINITION',
    'SINR_COLUMNS',
    'USER_SWEEP_COLUMNS',
    'ROC_COLUMNS',
    'PD_DELTA_COLUMNS',
    'MAX_SUBSET_USERS',
]


SEED_ENV_VAR = 'COEXIST_IA_SEED'

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

SNR_DEFINITION = ('snr_db = 10*log10(nominal per-user transmit power / (n_sc * sigma_w2)); '
                  'nominal power = power_scale * (m_slots or sigma_s2) * coding trace * d')

# subset enumeration for the unequal-dof check is refused above this many users
MAX_SUBSET_USERS = 20

SINR_COLUMNS = (
    'method', 'snr_db', 'trial', 'sum_sinr', 'sinr_per_user',
    'leakage', 'normalized_leakage', 'iterations', 'converged',
)
USER_SWEEP_COLUMNS = (
    'method', 'snr_db', 'users', 'trial', 'sum_sinr', 'leakage', 'iterations', 'converged', 'status',
)
ROC_COLUMNS = ('method', 'snr_db', 'target', 'pfa', 'pd', 'k', 'saturated', 'undersampled')
PD_DELTA_COLUMNS = (
    'snr_db', 'target', 'pfa', 'k', 'pd_proposed', 'pd_sssvsp', 'pd_delta', 'pfa_effective', 'undersampled',
)
