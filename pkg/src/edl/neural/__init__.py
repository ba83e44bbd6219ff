from .params import ParameterStore, glorot, uniform_init
from .adadelta import AdaDelta, adadelta_update
from .gradcheck import grad_check

__all__ = ["ParameterStore", "glorot", "uniform_init",
           "AdaDelta", "adadelta_update", "grad_check"]
