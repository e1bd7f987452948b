"""Resonances of one-sided scattering off a rising potential.

Modules:

* :mod:`riser.specfun`: complex Airy, Bessel, Gamma and confluent
  hypergeometric functions
* :mod:`riser.systems`: the potential systems and their aliases
* :mod:`riser.models`: closed-form reflection amplitudes
* :mod:`riser.matcher`: numerical integration and matching for any system
* :mod:`riser.poles`: complex-energy pole search and classification
* :mod:`riser.timedelay`: reflection phase, time delay and its peaks
* :mod:`riser.config`, :mod:`riser.report`, :mod:`riser.cli`: run
  configuration, output files and the command line
"""

from .systems import ALIASES, SystemSpec, make_system, system_from_alias

__version__ = "0.1.0"

__all__ = ["ALIASES", "SystemSpec", "make_system", "system_from_alias", "__version__"]
