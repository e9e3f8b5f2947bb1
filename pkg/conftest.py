# Test-harness wiring: unittest's assertWarns probes every module in
# sys.modules for ``__warningregistry__`` via getattr(..., None).  Pyomo's
# placeholder modules for unavailable optional dependencies (e.g. pyutilib)
# raise DeferredImportError instead of AttributeError for that probe.  Pyomo
# keeps an allow-list of such probe attributes; register this one too.
from pyomo.common.dependencies import ModuleUnavailable

ModuleUnavailable._getattr_raises_attributeerror.add('__warningregistry__')
