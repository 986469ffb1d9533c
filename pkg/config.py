class Config(object):
    # solver config
    DISCOUNTED_TOL = 1e-12
    SRABE_ROW_TOL  = 1e-12
    GRID_GAMMA     = 0.9999

    # enumeration caps
    ORACLE_CAP            = 10**6
    STATIONARY_CAP        = 10**6
    POLICY_ENUM_CAP       = 10**6
    STATIONARY_MAX_STATES = 4

    # output config
    JSON_INDENT = 2
    LOG_LEVEL   = "WARNING"
    LOG_FORMAT  = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Txt(object):
    # part of text configuration

    SOLVE_TXT = "{problem}: wrote {path}"

    POLICY_TXT = "{problem} policy: wrote {path}"

    SIMULATE_TXT = "{problem} from state {start}: {steps} steps, cycled={cycled}, realized={realized} -> {path}"

    FIXTURES_TXT = "wrote {count} fixtures to {path}"

    GRID_TXT = "{task} grid ({boundary}): wrote {files} files to {path}"

    MISSING_LABEL_TXT = "problem {problem!r} needs label {label!r}, which {path} does not define"

    VERIFY_HEADERS = ("trials", "clean", "raa mismatch", "rr mismatch", "raa rollout", "rr rollout", "stationary gap", "stationary checked")

    VERIFY_OK_TXT = "all {trials} trials agree with the oracle"

    VERIFY_FAIL_TXT = "{failed} of {trials} trials disagree; first failing trial {first}"
