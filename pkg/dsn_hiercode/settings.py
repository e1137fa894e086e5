import os

from pydantic import BaseModel, Field

# Irreducible polynomial per field exponent; bit i is the coefficient of x^i.
DEFAULT_MODULI = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

MIN_THETA = 2
MAX_THETA = 16

CONTAINER_MAGIC = b"DSNC"
CONTAINER_VERSION = 1


class Settings(BaseModel):
    color: bool = Field(default=False, description="ANSI colour in human-readable output.")
    log_level: str = Field(default="WARNING", description="Level of the stderr log sink used by the CLI.")
    lambda_enum_limit: int = Field(default=16, ge=0, description="Largest |B_i^l| for full lambda enumeration.")
    sample_threshold: int = Field(default=10**6, ge=1,
                                  description="Sweep strata larger than this are sampled instead of enumerated.")
    sample_size: int = Field(default=10**4, ge=1, description="Patterns drawn from an oversized stratum.")


def load_settings() -> Settings:
    """Read settings from the environment."""
    return Settings(
        color=os.getenv("DSN_HIERCODE_COLOR", "0") == "1",
        log_level=os.getenv("DSN_HIERCODE_LOG_LEVEL", "WARNING"),
        lambda_enum_limit=int(os.getenv("DSN_HIERCODE_LAMBDA_ENUM_LIMIT", 16)),
        sample_threshold=int(os.getenv("DSN_HIERCODE_SAMPLE_THRESHOLD", 10**6)),
        sample_size=int(os.getenv("DSN_HIERCODE_SAMPLE_SIZE", 10**4)),
    )
