VALIDATION = 'VALIDATION'
UNSTABLE = 'UNSTABLE'
NUMERIC = 'NUMERIC'
FIT = 'FIT'
SAMPLES = 'SAMPLES'
UNKNOWN_ERROR = 'UNKNOWN_ERROR'


class ConfigError(ValueError):
    """ Parameters or a scenario configuration failed validation """

    def __init__(self, message, fields=None):
        super(ConfigError, self).__init__(message)
        self.fields = [] if fields is None else list(fields)


class ClosedFormInapplicableError(ValueError):
    """ A closed-form result was requested outside the single-cavity, equal-damping regime """


class UnstableModelError(ArithmeticError):
    """ The drift matrix has an eigenvalue with non-negative real part """

    def __init__(self, message, abscissa=None):
        super(UnstableModelError, self).__init__(message)
        self.abscissa = abscissa


class NumericError(ArithmeticError):
    """ A solve or factorization broke its tolerance """

    def __init__(self, message, residual=None):
        super(NumericError, self).__init__(message)
        self.residual = residual


class FitError(RuntimeError):
    """ Lorentzian fit did not converge: best-so-far parameters are attached """

    def __init__(self, message, best_params=None):
        super(FitError, self).__init__(message)
        self.best_params = best_params


class InsufficientSamplesError(ValueError):
    """ Trajectory too short for a trustworthy occupation estimate """

    def __init__(self, message, required_steps=None):
        super(InsufficientSamplesError, self).__init__(message)
        self.required_steps = required_steps


class SweepError(RuntimeError):
    """ Raised when more than the allowed fraction of sweep points failed """

    def __init__(self, message, failures=None):
        super(SweepError, self).__init__(message)
        self.failures = [] if failures is None else failures


ERROR_CODES = (
    (ConfigError, VALIDATION),
    (ClosedFormInapplicableError, VALIDATION),
    (UnstableModelError, UNSTABLE),
    (NumericError, NUMERIC),
    (FitError, FIT),
    (InsufficientSamplesError, SAMPLES)
)


def derive_error_data(e, code=UNKNOWN_ERROR):
    """ Inspects an error to derive an error code and any attached info """

    error_data = {'error_code': code, 'underlying': error_to_string(e)}

    if code == UNKNOWN_ERROR:
        for error_class, error_code in ERROR_CODES:
            if isinstance(e, error_class):
                error_data['error_code'] = error_code
                break

    if getattr(e, 'fields', None):
        error_data['field_info'] = e.fields
    for attr in ('abscissa', 'residual', 'required_steps'):
        if getattr(e, attr, None) is not None:
            value = getattr(e, attr)
            error_data[attr] = value if isinstance(value, int) else float(value)

    return error_data


def error_to_string(error):
    """ Helper to derive information from an error even if blank """
    return getattr(error, 'message', str(error) or type(error).__name__)
