from hypothesis import HealthCheck, settings

# Compiled-kernel warmup can be slow on the first call inside a property;
# disable deadlines and keep example counts modest so the suite stays fast.
settings.register_profile(
    "searchbias",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("searchbias")
