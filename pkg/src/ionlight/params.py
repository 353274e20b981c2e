"""Physical parameters of the ion-cavity system and the derived coupling rates.

Everything in this module is plain arithmetic on experimentally settable
quantities.  Conventions:

* All frequencies and rates are ANGULAR (rad/s) inside the code.  Config
  files quote linear frequencies in Hz (the usual "2 pi x 3 MHz" lab
  convention); they are multiplied by 2 pi on ingestion.
* The detuning ``delta`` is signed.  The pulsed entanglement protocol needs
  |chi2| > |chi1|, which for the default geometry requires delta < 0.
* Absolute optical frequencies never appear; only the detuning and the +/- nu
  sideband offsets enter any formula.

The two Raman coupling rates are

    chi1 = eta * conj(g1) * Omega * (cos(theta_L)/(delta - nu + i*gamma/2)
                                     - alpha1*cos(theta_c)/(delta + i*gamma/2))
    chi2 = eta * conj(g2) * Omega * (cos(theta_L)/(delta + nu + i*gamma/2)
                                     - alpha2*cos(theta_c)/(delta + i*gamma/2))

with eta = sqrt(hbar k^2 / (2 M nu)) the Lamb-Dicke parameter.  When
|chi2| > |chi1| the coupled three-mode dynamics are periodic with rate
Theta = sqrt(|chi2|^2 - |chi1|^2); the pulse of interest lasts one
half-period T_pi = pi / Theta and creates on average
n_mean = 4 r^2 / (1 - r^2)^2 photons per cavity mode, where r = |chi2/chi1|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, DegenerateCouplingError, ParameterError

# Reduced Planck constant, J*s (CODATA 2018 exact value).
HBAR = 1.054571817e-34

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhysicalParams:
    """All experimentally settable quantities, validated on construction.

    Frequencies/rates are angular (rad/s); see the module docstring.
    """

    nu: float                    # motional (trap) frequency, rad/s
    gamma: float                 # atomic linewidth, rad/s
    delta: float                 # laser-atom detuning, signed, rad/s
    omega_rabi: float            # laser Rabi frequency, rad/s
    kappa: float                 # cavity field (amplitude) decay rate, rad/s
    g1: complex                  # vacuum Rabi frequency of cavity mode 1, rad/s
    g2: complex                  # vacuum Rabi frequency of cavity mode 2, rad/s
    alpha1: float = 0.0          # cavity-mode field-gradient scalar, mode 1
    alpha2: float = 0.0          # cavity-mode field-gradient scalar, mode 2
    theta_l: float = 0.0         # angle trap axis <-> laser wave vector, rad
    theta_c: float = math.pi / 2   # angle trap axis <-> cavity axis, rad
    mass: float = 0.0            # atomic mass, kg
    wavenumber: float = 0.0      # optical wavenumber k, 1/m
    nbar_motion: float = 0.0     # initial mean thermal phonon number
    pulse_length_t: Optional[float] = None  # laser pulse duration, s (None -> T_pi)

    def __post_init__(self):
        for name in ("nu", "gamma", "kappa", "mass", "wavenumber", "omega_rabi"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ParameterError(f"{name} must be positive, got {value!r}")
        if self.nbar_motion < 0.0:
            raise ParameterError(f"nbar_motion must be >= 0, got {self.nbar_motion!r}")
        if self.pulse_length_t is not None and not self.pulse_length_t > 0.0:
            raise ParameterError("pulse_length_t must be positive when given")
        # Pole guard: the Raman denominators delta -+ nu would be resonant.
        # Within one linewidth of either pole the adiabatic elimination behind
        # chi1/chi2 is meaningless, so such parameter sets are rejected here.
        if min(abs(self.delta - self.nu), abs(self.delta + self.nu)) < self.gamma:
            raise ParameterError(
                "detuning is within one linewidth of a Raman resonance "
                f"(|delta -+ nu| < gamma): delta={self.delta!r}, nu={self.nu!r}, "
                f"gamma={self.gamma!r}"
            )

    @property
    def lamb_dicke(self) -> float:
        """Lamb-Dicke parameter for this mass, wavenumber and trap frequency."""
        return lamb_dicke(self.mass, self.wavenumber, self.nu)


@dataclass(frozen=True)
class Couplings:
    """Raman coupling rates and the quantities derived from them.

    Fields that only exist for |chi2| > |chi1| (``theta_rate``, ``t_pi``,
    ``n_mean``) are ``None`` when undefined, never NaN.  ``r`` is ``None``
    only when chi1 = chi2 = 0 and ``math.inf`` when chi1 = 0 but chi2 != 0.
    """

    chi1: complex                      # pair-creation rate (mode 1 <-> motion), rad/s
    chi2: complex                      # exchange rate (mode 2 <-> motion), rad/s
    eta: Optional[float] = None        # Lamb-Dicke parameter used, if known
    theta_rate: Optional[float] = None   # sqrt(|chi2|^2 - |chi1|^2), rad/s
    r: Optional[float] = None          # |chi2 / chi1|
    beta: Optional[float] = None       # arg(chi1) + arg(chi2), rad
    t_pi: Optional[float] = None       # pi / theta_rate, s
    n_mean: Optional[float] = None     # 4 r^2 / (1 - r^2)^2

    @classmethod
    def from_chis(cls, chi1: complex, chi2: complex,
                  eta: Optional[float] = None) -> "Couplings":
        """Build a record from the two rates, deriving what is derivable.

        chi1 = 0 is accepted and treated as the r -> infinity limit (the
        exchange coupling alone): theta_rate = |chi2| and n_mean = 0.
        """
        chi1 = complex(chi1)
        chi2 = complex(chi2)
        theta = r = beta = t_pi = n_mean = None
        if chi1 == 0 and chi2 == 0:
            pass
        elif chi1 == 0:
            r = math.inf
            theta = abs(chi2)
            t_pi = math.pi / theta
            n_mean = 0.0
        else:
            r = abs(chi2) / abs(chi1)
            beta = cmath.phase(chi1) + cmath.phase(chi2)
            if r > 1.0:
                theta = math.sqrt(abs(chi2) ** 2 - abs(chi1) ** 2)
                t_pi = math.pi / theta
                n_mean = 4.0 * r ** 2 / (1.0 - r ** 2) ** 2
        return cls(chi1=chi1, chi2=chi2, eta=eta, theta_rate=theta, r=r,
                   beta=beta, t_pi=t_pi, n_mean=n_mean)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def lamb_dicke(mass: float, wavenumber: float, nu: float) -> float:
    """Lamb-Dicke parameter sqrt(hbar k^2 / (2 M nu)).

    Parameters
    ----------
    mass : float
        Atomic mass in kg.
    wavenumber : float
        Optical wavenumber k in 1/m.
    nu : float
        Trap (motional) angular frequency in rad/s.

    Returns
    -------
    float
        The dimensionless ratio of the zero-point motion to the optical
        wavelength scale.  Scales as k, 1/sqrt(M) and 1/sqrt(nu).
    """
    if not (mass > 0.0 and wavenumber > 0.0 and nu > 0.0):
        raise ParameterError(
            f"lamb_dicke needs positive inputs, got mass={mass!r}, "
            f"wavenumber={wavenumber!r}, nu={nu!r}"
        )
    return math.sqrt(HBAR * wavenumber ** 2 / (2.0 * mass * nu))


def coupling_constants(params: PhysicalParams) -> Couplings:
    """Evaluate chi1 and chi2 for a parameter set.

    The two rates differ through the Raman denominators delta -+ nu; their
    asymmetry (r = |chi2/chi1| > 1 for delta < 0 in the default geometry) is
    what drives the entangling dynamics.
    """
    eta = params.lamb_dicke
    d1 = params.delta - params.nu + 0.5j * params.gamma
    d2 = params.delta + params.nu + 0.5j * params.gamma
    d0 = params.delta + 0.5j * params.gamma
    if d1 == 0 or d2 == 0 or d0 == 0:
        raise ParameterError(
            "Raman denominator is exactly zero (delta -+ nu = 0 with gamma = 0)"
        )
    laser = math.cos(params.theta_l)
    cav = math.cos(params.theta_c)
    pref1 = eta * params.g1.conjugate() * params.omega_rabi
    pref2 = eta * params.g2.conjugate() * params.omega_rabi
    chi1 = pref1 * (laser / d1 - params.alpha1 * cav / d0)
    chi2 = pref2 * (laser / d2 - params.alpha2 * cav / d0)
    return Couplings.from_chis(chi1, chi2, eta=eta)


def derived_rates(chi1: complex, chi2: complex):
    """Derived quantities for a given pair of coupling rates.

    Returns
    -------
    tuple
        ``(theta_rate, r, beta, t_pi, n_mean)``.  The rate, half-period and
        photon number are ``None`` unless r > 1.

    Raises
    ------
    DegenerateCouplingError
        If chi1 = 0 (r is undefined).
    """
    if chi1 == 0:
        raise DegenerateCouplingError("chi1 = 0: the ratio r = |chi2/chi1| is undefined")
    c = Couplings.from_chis(chi1, chi2)
    return (c.theta_rate, c.r, c.beta, c.t_pi, c.n_mean)


# ---------------------------------------------------------------------------
# operating-regime report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeConstraint:
    """One inequality of the operating regime, evaluated as left >= ratio*right."""

    name: str
    left: Optional[float]
    right: Optional[float]
    required_ratio: float
    passed: bool

    @property
    def margin(self) -> Optional[float]:
        """How many times the left side exceeds the right (None if undefined)."""
        if self.left is None or self.right is None or self.right == 0.0:
            return None
        return self.left / self.right


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of all validity inequalities for one parameter set.

    ``constraints`` are the hard inequalities; the overall verdict is a pass
    if and only if every one of them passes.  ``soft`` holds the
    kappa * T_pi check, reported separately because realistic parameter sets
    satisfy it only with a modest margin.
    """

    constraints: tuple
    soft: tuple
    ratio: float
    soft_ratio: float

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.constraints)

    def as_text(self) -> str:
        lines = []
        width = max(len(c.name) for c in self.constraints + self.soft)
        header = f"{'constraint':<{width}}  {'left':>13}  {'right':>13}  {'margin':>10}  result"
        lines.append(header)
        lines.append("-" * len(header))
        for c in self.constraints + self.soft:
            left = "undefined" if c.left is None else f"{c.left:.6e}"
            right = "undefined" if c.right is None else f"{c.right:.6e}"
            margin = "-" if c.margin is None else f"{c.margin:.3f}"
            result = "pass" if c.passed else "FAIL"
            soft_tag = " (soft)" if c in self.soft else ""
            lines.append(f"{c.name:<{width}}  {left:>13}  {right:>13}  {margin:>10}  {result}{soft_tag}")
        lines.append(f"threshold for '>>': factor {self.ratio:g} "
                     f"(soft checks: factor {self.soft_ratio:g})")
        lines.append(f"overall: {'PASS' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines)


def validate_regime(params: PhysicalParams, couplings: Optional[Couplings] = None,
                    much_greater_ratio: float = 10.0,
                    soft_ratio: float = 2.0) -> RegimeReport:
    """Check every inequality required for the pulsed-entanglement description.

    Each hard constraint is evaluated as ``left >= much_greater_ratio * right``.
    Failures are report entries, never exceptions.  kappa * T_pi <= 1/soft_ratio
    is reported separately as a soft check.
    """
    if not much_greater_ratio > 1.0:
        raise ParameterError("much_greater_ratio must exceed 1")
    if couplings is None:
        couplings = coupling_constants(params)
    eta = params.lamb_dicke
    theta = couplings.theta_rate
    t_pulse = params.pulse_length_t if params.pulse_length_t is not None else couplings.t_pi

    ratio = much_greater_ratio
    rows = []

    def hard(name, left, right):
        ok = (left is not None and right is not None and left >= ratio * right)
        rows.append(RegimeConstraint(name, left, right, ratio, ok))

    abs_delta = abs(params.delta)
    scatter1 = params.gamma * abs(params.g1) ** 2 / params.delta ** 2
    scatter2 = params.gamma * abs(params.g2) ** 2 / params.delta ** 2
    recoil_heating = eta ** 2 * params.gamma * params.omega_rabi ** 2 / params.delta ** 2

    hard("|delta| >> nu", abs_delta, params.nu)
    hard("|delta| >> gamma", abs_delta, params.gamma)
    hard("nu >> theta", params.nu, theta)
    hard("theta >> kappa", theta, params.kappa)
    hard("kappa >> gamma*|g1|^2/delta^2", params.kappa, scatter1)
    hard("kappa >> gamma*|g2|^2/delta^2", params.kappa, scatter2)
    hard("theta >> eta^2*gamma*omega^2/delta^2", theta, recoil_heating)
    hard("nu*T >> 1",
         None if t_pulse is None else params.nu * t_pulse, 1.0)
    hard("1 >> eta", 1.0, eta)

    if theta is None or couplings.t_pi is None:
        kappa_tpi = None
        soft_ok = False
    else:
        kappa_tpi = params.kappa * couplings.t_pi
        soft_ok = kappa_tpi <= 1.0 / soft_ratio
    soft_row = RegimeConstraint("kappa*t_pi <= 1/soft_ratio",
                                1.0, kappa_tpi, soft_ratio, soft_ok)

    return RegimeReport(constraints=tuple(rows), soft=(soft_row,),
                        ratio=ratio, soft_ratio=soft_ratio)


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

# Frequencies are entered in linear Hz and converted to rad/s on ingestion.
FREQUENCY_KEYS = {
    "nu_hz": "nu",
    "gamma_hz": "gamma",
    "delta_hz": "delta",
    "omega_rabi_hz": "omega_rabi",
    "kappa_hz": "kappa",
    "g1_hz": "g1",
    "g2_hz": "g2",
}
COMPLEX_FIELDS = {"g1", "g2"}
PLAIN_KEYS = {
    "alpha1": "alpha1",
    "alpha2": "alpha2",
    "theta_l": "theta_l",
    "theta_c": "theta_c",
    "mass": "mass",
    "wavenumber": "wavenumber",
    "nbar_motion": "nbar_motion",
    "pulse_length_t": "pulse_length_t",
}
REQUIRED_KEYS = ("nu_hz", "gamma_hz", "delta_hz", "omega_rabi_hz", "kappa_hz",
                 "g1_hz", "g2_hz", "mass", "wavenumber")


def parse_config_text(text: str) -> dict:
    """Parse the flat key-value config format.

    One ``key = value`` pair per line; ``#`` starts a comment; blank lines are
    ignored.  Returns ``{key: (raw_value_string, line_number)}``.  Duplicate
    keys and malformed lines raise :class:`ConfigError` with the line number.
    """
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        entries[key] = (value, lineno)
    return entries


def load_config(path) -> dict:
    """Read and parse a config file; see :func:`parse_config_text`."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read())


def params_from_config(entries: dict):
    """Build PhysicalParams from parsed config entries.

    Returns ``(params, leftovers)`` where ``leftovers`` maps keys not owned by
    this module (run-level settings for the CLI) to their raw entries.
    Unknown-key rejection is the caller's job, since it knows the full key set.
    """
    missing = [key for key in REQUIRED_KEYS if key not in entries]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(sorted(missing))}")
    kwargs = {}
    leftovers = {}
    for key, (raw, lineno) in entries.items():
        if key in FREQUENCY_KEYS:
            fieldname = FREQUENCY_KEYS[key]
            value = _parse_number(raw, key, lineno,
                                  want_complex=fieldname in COMPLEX_FIELDS)
            kwargs[fieldname] = value * TWO_PI
        elif key in PLAIN_KEYS:
            kwargs[PLAIN_KEYS[key]] = _parse_number(raw, key, lineno)
        else:
            leftovers[key] = (raw, lineno)
    try:
        return PhysicalParams(**kwargs), leftovers
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_number(raw: str, key: str, lineno: int, want_complex: bool = False):
    try:
        if want_complex:
            return complex(raw)
        return float(raw)
    except ValueError as exc:
        kind = "complex" if want_complex else "real"
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as a {kind} number",
                          line=lineno) from exc
