from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    """Brute-force caps, in assignments or amplitudes."""

    search_cap: int = 10**7
    state_cap: int = 10**6
    oracle_cap: int = 10**6

    def with_cap(self, cap):
        # a single --cap flag raises or lowers every limit at once
        if cap is None:
            return self
        return replace(self, search_cap=cap, state_cap=cap, oracle_cap=cap)


DEFAULT_LIMITS = Limits()
