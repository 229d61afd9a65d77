"""Exception types raised by the simulator."""


class ContractError(ValueError):
    """An operation was called with arguments outside its contract."""


class UndefinedFidelityError(ContractError):
    """Fidelity requested for a zero-norm state."""


class BasisMismatchError(ContractError):
    """A photon state is expressed in the wrong polarization basis."""


class SingularParametersError(ContractError):
    """Cavity parameters give a vanishing scattering denominator."""


class DegenerateCoefficientsError(ContractError):
    """Scattering coefficients are all zero, so efficiency ratios are undefined."""
