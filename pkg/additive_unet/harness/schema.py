"""Published schema of the run-configuration JSON file."""

from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from additive_unet.errors import ConfigError

# Missing keys fall back to the dataclass defaults, so every field defaults to
# None here; an explicit null is still rejected unless the type allows it.
_CLOSED = ConfigDict(extra="forbid", strict=True)

PositiveSigma = Annotated[float, Field(gt=0)]
EvalSigma = Annotated[float, Field(ge=0)]


class SynthDocument(BaseModel):
    model_config = _CLOSED

    count: int = Field(None, ge=1)
    height: int = Field(None, ge=16)
    width: int = Field(None, ge=16)
    seed: int = None


class ModelDocument(BaseModel):
    model_config = _CLOSED

    variant: Literal["real_additive", "pseudo_additive", "dncnn"] = None
    depth: int = Field(None, ge=1)
    channels: int = Field(None, ge=1)
    kernel_schedule: list[Annotated[int, Field(ge=1)]] = None
    seed: int = None


class TrainDocument(BaseModel):
    model_config = _CLOSED

    steps: Annotated[int, Field(ge=0)] | None = None
    epochs: Annotated[int, Field(ge=0)] | None = None
    batch_size: int = Field(None, ge=1)
    lr: float = Field(None, gt=0)
    sigma_list: list[PositiveSigma] = Field(None, min_length=1)
    patch_size: int = Field(None, ge=1)
    realizations: int = Field(None, ge=1)
    crops_per_image: int = Field(None, ge=1)
    seed: int = None
    epsilon: float = Field(None, gt=0)
    renoise_each_epoch: bool = None
    dataset_dir: str | None = None
    synth: SynthDocument | None = None
    checkpoint_every: int = Field(None, ge=0)
    log_every: int = Field(None, ge=0)


class EvalDocument(BaseModel):
    model_config = _CLOSED

    dataset_dir: str | None = None
    synth: SynthDocument | None = None
    sigma_list: list[EvalSigma] = Field(None, min_length=1)
    seed: int = None
    write_images: bool = None
    include_noisy: bool = None


class RunDocument(BaseModel):
    """Additive U-Net run configuration."""

    model_config = ConfigDict(extra="forbid", strict=True, title="Additive U-Net run configuration")

    name: str = Field(None, description="Run name; default output directory is $ADDUNET_OUTPUT_ROOT/<name>")
    output_dir: str = None
    model: ModelDocument = None
    train: TrainDocument = None
    eval: EvalDocument = None


def load_schema() -> dict[str, Any]:
    """JSON schema of the configuration file."""
    return RunDocument.model_json_schema()


def validate_run_dict(data: Any) -> None:
    """
    Check a run configuration dict against the schema.

    Raises:
        ConfigError: Listing every violation found.
    """
    try:
        RunDocument.model_validate(data)
    except ValidationError as e:
        problems = []
        for error in e.errors():
            where = ".".join(str(part) for part in error["loc"]) or "config"
            problems.append(f"{where}: {error['msg']}")
        raise ConfigError("invalid run config: " + "; ".join(problems)) from None
