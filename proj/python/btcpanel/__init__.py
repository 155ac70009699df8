"""Python wrapper over the C++ pipeline core."""

import json

from _btcpanel import (  # noqa: F401
    ConfigurationError,
    DomainValueError,
    ModelError,
    SchemaError,
    ThresholdAbort,
    build,
    chi2_upper_tail,
    depreciation,
    fod,
    premium,
    quantile_bounds,
    synth,
    week_id,
)
import _btcpanel as _core


def summary(panel_path):
    return json.loads(_core.summary_json(str(panel_path)))


def regress(panel_path, model_id, delta=-1.0, time_fe=""):
    return json.loads(_core.regress_json(str(panel_path), model_id, delta, time_fe))


def var(panel_path, group="unconstrained", lags=1):
    return json.loads(_core.var_json(str(panel_path), group, lags))
