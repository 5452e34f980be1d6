import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from shadowwave.models import GasModel, State

settings.register_profile(
    "default", derandomize=True, deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

densities = st.floats(0.1, 10.0)
velocities = st.floats(-5.0, 5.0)
states = st.builds(State, densities, velocities)
alphas = st.floats(0.05, 0.95)
models = st.one_of(
    st.just(GasModel.pressureless()), st.just(GasModel.chaplygin()), alphas.map(GasModel.generalized)
)
pressure_models = st.one_of(st.just(GasModel.chaplygin()), alphas.map(GasModel.generalized))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: int(k.split()[0][1:])):
        terminalreporter.write_line(mod.RESULTS[key])
