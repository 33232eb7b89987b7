"""Training, evaluation, table and CLI behaviour of the harness."""

import json
import math
import os
import threading

import numpy as np
import pytest

import main as cli
from additive_unet.data import save_image
from additive_unet.errors import ConfigError, DataError, NumericError
from additive_unet.harness import (
    EvalConfig,
    RunConfig,
    RunManifest,
    SynthSpec,
    TrainConfig,
    cmd_denoise,
    cmd_eval,
    cmd_spectra,
    cmd_sweep_alpha,
    cmd_table,
    cmd_train,
    list_presets,
    load_preset,
    load_schema,
    read_loss_log,
    validate_run_dict,
    with_overrides,
)
from additive_unet.harness.train import PatchSchedule, build_patch_pool, load_images
from additive_unet.metrics import evaluate_noisy, make_eval_set, mean_scores
from additive_unet.model import ModelConfig, Variant, build_params, load_checkpoint, save_checkpoint
from additive_unet.tensor import mean, scalar_mul


def tiny_run(output_dir, steps=6, **train):
    settings = dict(
        steps=steps,
        epochs=None,
        batch_size=2,
        lr=1e-3,
        sigma_list=[25.0],
        patch_size=16,
        realizations=2,
        crops_per_image=2,
        synth=SynthSpec(count=3, height=32, width=32, seed=0),
        log_every=0,
    )
    settings.update(train)
    return RunConfig(
        model=ModelConfig(Variant.REAL_ADDITIVE, 2, 3, [3, 3], seed=1),
        train=TrainConfig(**settings),
        eval=EvalConfig(),
        output_dir=str(output_dir),
        name="tiny",
    )


def identity_checkpoint(path):
    params = build_params(ModelConfig(Variant.DNCNN, depth=3, channels=2))
    for tensor in params.named_tensors().values():
        tensor.data[...] = 0.0
    return save_checkpoint(str(path), params)


# =============================================================================
# Training
# =============================================================================


def test_zero_steps_saves_initialization(tmp_path):
    config = tiny_run(tmp_path / "run", steps=0)
    manifest = cmd_train(config, verbose=False)
    saved = load_checkpoint(manifest.checkpoint).params.named_tensors()
    initial = build_params(config.model).named_tensors()
    for name in initial:
        assert saved[name].data.tobytes() == initial[name].data.tobytes()
    assert read_loss_log(manifest.loss_log) == []
    assert manifest.steps_completed == 0


def test_identical_configs_give_identical_loss_logs(tmp_path):
    first = cmd_train(tiny_run(tmp_path / "a"), verbose=False)
    second = cmd_train(tiny_run(tmp_path / "b"), verbose=False)
    with open(first.loss_log, "rb") as fa, open(second.loss_log, "rb") as fb:
        assert fa.read() == fb.read()
    losses = read_loss_log(first.loss_log)
    assert [step for step, _ in losses] == [1, 2, 3, 4, 5, 6]
    assert all(math.isfinite(loss) and loss > 0 for _, loss in losses)


def test_resumed_run_matches_uninterrupted_run(tmp_path):
    straight = cmd_train(tiny_run(tmp_path / "straight", steps=7), verbose=False)

    cmd_train(tiny_run(tmp_path / "split", steps=3), verbose=False)
    resumed = cmd_train(
        tiny_run(tmp_path / "split", steps=7),
        resume=str(tmp_path / "split" / "checkpoint.bin"),
        verbose=False,
    )

    with open(straight.loss_log, "rb") as fa, open(resumed.loss_log, "rb") as fb:
        assert fa.read() == fb.read()
    a = load_checkpoint(straight.checkpoint).params.named_tensors()
    b = load_checkpoint(resumed.checkpoint).params.named_tensors()
    assert all(a[n].data.tobytes() == b[n].data.tobytes() for n in a)


def test_runs_on_separate_threads_are_independent(tmp_path):
    sequential = cmd_train(tiny_run(tmp_path / "alone", steps=4), verbose=False)

    manifests: dict[str, object] = {}
    errors: list[BaseException] = []

    def worker(name):
        try:
            manifests[name] = cmd_train(tiny_run(tmp_path / name, steps=4), verbose=False)
        except BaseException as e:  # noqa: BLE001
            errors.append(e)

    threads = [threading.Thread(target=worker, args=(name,)) for name in ("left", "right")]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert errors == []
    expected = open(sequential.loss_log, "rb").read()
    for manifest in manifests.values():
        assert open(manifest.loss_log, "rb").read() == expected


def test_resume_with_other_model_is_rejected(tmp_path):
    cmd_train(tiny_run(tmp_path / "run", steps=1), verbose=False)
    other = with_overrides(tiny_run(tmp_path / "run"), {"model.channels": 5})
    with pytest.raises(ConfigError):
        cmd_train(other, resume=str(tmp_path / "run" / "checkpoint.bin"), verbose=False)


def test_batches_are_a_function_of_the_step(tmp_path):
    config = tiny_run(tmp_path)
    pool = build_patch_pool(load_images(None, config.train.synth), config.train)
    assert pool.shape == (6, 1, 16, 16)
    schedule = PatchSchedule(pool, config.train)
    assert schedule.steps_per_epoch == 6
    assert schedule.batch(4).noisy.data.tobytes() == PatchSchedule(pool, config.train).batch(4).noisy.data.tobytes()
    assert schedule.batch(1).noisy.data.tobytes() != schedule.batch(7).noisy.data.tobytes()


def test_epochs_drive_step_count(tmp_path):
    config = tiny_run(tmp_path, steps=None, epochs=2, batch_size=4)
    pool = build_patch_pool(load_images(None, config.train.synth), config.train)
    # 6 patches x 2 realizations in batches of 4
    assert PatchSchedule(pool, config.train).total_steps() == 6


def test_non_finite_loss_aborts(tmp_path, monkeypatch):
    monkeypatch.setattr(
        "additive_unet.harness.train.charbonnier",
        lambda pred, target, epsilon: mean(scalar_mul(float("nan"), pred)),
    )
    with pytest.raises(NumericError, match="step 1"):
        cmd_train(tiny_run(tmp_path / "nan"), verbose=False)


def test_patch_larger_than_images(tmp_path):
    with pytest.raises(DataError):
        cmd_train(tiny_run(tmp_path / "big", patch_size=40), verbose=False)


def test_train_manifest_records_run(tmp_path):
    config = tiny_run(tmp_path / "run", steps=2)
    config.eval = EvalConfig(synth=SynthSpec(count=2, height=32, width=32, seed=1), sigma_list=[25.0])
    manifest = cmd_train(config, verbose=False)
    restored = RunManifest.read(str(tmp_path / "run"))
    assert restored.command == "train"
    assert restored.config == config.to_dict()
    assert restored.code_version
    assert len(restored.gates) == 2
    [entry] = restored.final_metrics
    assert entry["sigma"] == 25.0 and entry["count"] == 2
    assert manifest.config_digest == restored.config_digest


# =============================================================================
# Evaluation and reports
# =============================================================================


def test_eval_row_count_and_outputs(tmp_path):
    cmd_train(tiny_run(tmp_path / "a", steps=1), verbose=False)
    cmd_train(tiny_run(tmp_path / "b", steps=2), verbose=False)
    eval_config = EvalConfig(
        synth=SynthSpec(count=3, height=32, width=32, seed=1), sigma_list=[15.0, 25.0], write_images=True
    )
    out = tmp_path / "eval"
    report = cmd_eval(
        [str(tmp_path / "a" / "checkpoint.bin"), str(tmp_path / "b" / "checkpoint.bin")],
        eval_config,
        str(out),
        verbose=False,
    )
    assert len(report.rows) == 2 * 2 * 3
    assert len({r.model_id for r in report.rows}) == 2
    assert len(open(out / "metrics_per_image.csv").read().splitlines()) == 13
    assert len(open(out / "metrics_table.csv").read().splitlines()) == 3
    assert (out / "eval_manifest.json").exists()
    assert sum(len(files) for _, _, files in os.walk(out / "images")) == 12


def test_identity_dncnn_scores_noisy_psnr(tmp_path, mid_gray_images):
    for name, image in mid_gray_images:
        save_image(image, str(tmp_path / "images" / f"{name}.png"))
    checkpoint = identity_checkpoint(tmp_path / "identity.bin")
    config = EvalConfig(dataset_dir=str(tmp_path / "images"), sigma_list=[0.0, 25.0], include_noisy=True)
    report = cmd_eval([checkpoint], config, str(tmp_path / "eval"), verbose=False)

    aggregates = {(a.model_id, a.sigma): a for a in report.aggregates()}
    assert aggregates[("DnCNN-3", 25.0)].psnr_db == pytest.approx(20 * math.log10(255 / 25), abs=0.3)
    assert aggregates[("DnCNN-3", 25.0)].psnr_db == pytest.approx(aggregates[("noisy", 25.0)].psnr_db)
    assert all(r.psnr_db == math.inf for r in report.rows if r.sigma == 0.0)


def test_eval_missing_checkpoint(tmp_path):
    with pytest.raises(DataError):
        cmd_eval([str(tmp_path / "none.bin")], EvalConfig(synth=SynthSpec(count=1)), str(tmp_path), verbose=False)


def test_table_agrees_with_eval_csv(tmp_path):
    cmd_train(tiny_run(tmp_path / "a", steps=1), verbose=False)
    config = EvalConfig(synth=SynthSpec(count=2, height=32, width=32, seed=1), sigma_list=[15.0, 25.0, 50.0])
    cmd_eval([str(tmp_path / "a" / "checkpoint.bin")], config, str(tmp_path / "eval"), verbose=False)
    cmd_table([str(tmp_path / "eval" / "eval_manifest.json")], str(tmp_path / "table.csv"), verbose=False)

    table = open(tmp_path / "table.csv").read()
    assert table == open(tmp_path / "eval" / "metrics_table.csv").read()
    header = table.splitlines()[0].split(",")
    assert header[1::2] == ["sigma15_psnr", "sigma25_psnr", "sigma50_psnr"]


def test_table_single_manifest_single_sigma(tmp_path):
    config = tiny_run(tmp_path / "run", steps=1)
    config.eval = EvalConfig(synth=SynthSpec(count=1, height=32, width=32), sigma_list=[25.0])
    cmd_train(config, verbose=False)
    aggregates = cmd_table([str(tmp_path / "run")], str(tmp_path / "t.csv"), verbose=False)
    assert len(aggregates) == 1
    assert len(open(tmp_path / "t.csv").read().splitlines()) == 2


def test_table_rejects_mismatched_sigmas(tmp_path):
    for name, sigma in [("a", 15.0), ("b", 25.0)]:
        config = tiny_run(tmp_path / name, steps=1, sigma_list=[sigma])
        config.model = ModelConfig(Variant.REAL_ADDITIVE, 2, 3, [3, 3], seed=1 if name == "a" else 2)
        config.eval = EvalConfig(synth=SynthSpec(count=1, height=32, width=32), sigma_list=[sigma])
        cmd_train(config, verbose=False)
    # same label at different sigmas merges into one row
    aggregates = cmd_table([str(tmp_path / "a"), str(tmp_path / "b")], str(tmp_path / "t.csv"), verbose=False)
    assert len({a.model_id for a in aggregates}) == 1

    dncnn = tiny_run(tmp_path / "c", steps=1)
    dncnn.model = ModelConfig(Variant.DNCNN, 3, 2)
    dncnn.eval = EvalConfig(synth=SynthSpec(count=1, height=32, width=32), sigma_list=[25.0])
    cmd_train(dncnn, verbose=False)
    with pytest.raises(DataError, match="inconsistent sigma sets"):
        cmd_table([str(tmp_path / d) for d in "abc"], str(tmp_path / "t2.csv"), verbose=False)


def test_table_needs_manifests(tmp_path):
    with pytest.raises(DataError):
        cmd_table([], str(tmp_path / "t.csv"), verbose=False)


def test_denoise_writes_pairs(tmp_path, mid_gray_images):
    name, image = mid_gray_images[0]
    source = save_image(image, str(tmp_path / f"{name}.png"))
    written = cmd_denoise(identity_checkpoint(tmp_path / "id.bin"), [source], str(tmp_path / "out"), sigma=25.0, verbose=False)
    assert sorted(os.path.basename(p) for p in written) == ["ramp_denoised.png", "ramp_noisy.png"]


def test_sweep_and_spectra_commands(tmp_path):
    manifest = cmd_train(tiny_run(tmp_path / "run", steps=2), verbose=False)
    eval_config = EvalConfig(synth=SynthSpec(count=1, height=32, width=32, seed=1))
    result = cmd_sweep_alpha(manifest.checkpoint, eval_config, str(tmp_path / "run"), steps=5, verbose=False)
    assert len(result.psnr_curve) == 5
    assert (tmp_path / "run" / "sweep_alpha_gate0.csv").exists()

    profiles = cmd_spectra(manifest.checkpoint, str(tmp_path / "spectra"), pad_to=16, top_k=2, verbose=False)
    assert [p.layer for p in profiles] == ["enc.0.first", "enc.1.first"]
    assert (tmp_path / "spectra" / "spectral_centroids.csv").exists()


def test_sweep_needs_gates(tmp_path):
    checkpoint = identity_checkpoint(tmp_path / "id.bin")
    with pytest.raises(ConfigError):
        cmd_sweep_alpha(checkpoint, EvalConfig(synth=SynthSpec(count=1)), str(tmp_path), verbose=False)


# =============================================================================
# Configuration
# =============================================================================


@pytest.mark.parametrize("name", list_presets())
def test_presets_load(name):
    config = load_preset(name)
    assert config.name == name
    validate_run_dict(config.to_dict())


def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_preset("preset-huge")


def test_config_round_trips_through_json(tmp_path):
    config = load_preset("preset-smoke")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config.to_dict()))
    assert RunConfig.from_json(str(path)).to_dict() == config.to_dict()


@pytest.mark.parametrize(
    "patch",
    [
        {"train": {"batch_size": 0}},
        {"train": {"sigma_list": []}},
        {"train": {"lr": "fast"}},
        {"model": {"variant": "transformer"}},
        {"surprise": 1},
    ],
)
def test_invalid_config_rejected(patch):
    data = load_preset("preset-smoke").to_dict()
    for key, value in patch.items():
        if isinstance(value, dict):
            data[key].update(value)
        else:
            data[key] = value
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data)


def test_validation_lists_every_problem():
    data = load_preset("preset-smoke").to_dict()
    data["train"]["batch_size"] = True
    data["eval"]["synth"]["height"] = 8
    data["model"]["extra"] = 1
    with pytest.raises(ConfigError) as caught:
        validate_run_dict(data)
    message = str(caught.value)
    for where in ("train.batch_size", "eval.synth.height", "model.extra"):
        assert where in message


def test_validation_rejects_non_objects():
    with pytest.raises(ConfigError):
        validate_run_dict([1, 2])
    with pytest.raises(ConfigError):
        validate_run_dict({"train": {"steps": -1}})
    validate_run_dict({"train": {"steps": None, "lr": 1}})


def test_schema_is_published():
    schema = load_schema()
    assert schema["additionalProperties"] is False
    assert set(schema["properties"]) == {"name", "output_dir", "model", "train", "eval"}


def test_overrides_apply_dotted_paths():
    config = with_overrides(load_preset("preset-smoke"), {"train.steps": 5, "train.sigma_list": [50.0], "train.lr": None})
    assert config.train.steps == 5
    assert config.train.sigma == 50.0
    assert config.train.lr == 1e-3


def test_multiple_training_sigmas_need_a_choice():
    config = with_overrides(load_preset("preset-smoke"), {"train.sigma_list": [15.0, 25.0]})
    with pytest.raises(ConfigError):
        config.train.sigma


def test_output_dir_follows_environment(output_root):
    assert load_preset("preset-overfit").output_dir == os.path.join(str(output_root), "preset-overfit")


# =============================================================================
# Command line
# =============================================================================


def _error_line(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


def test_cli_missing_checkpoint_exits_2(tmp_path, capsys):
    assert cli.main(["eval", str(tmp_path / "missing.bin"), "--synth", "1"]) == 2
    assert _error_line(capsys).startswith("error[checkpoint]: ")


def test_cli_usage_errors_exit_1(capsys):
    assert cli.main(["train"]) == 1
    assert _error_line(capsys).startswith("error[usage]: ")
    assert cli.main(["no-such-command"]) == 1
    assert _error_line(capsys).startswith("error[usage]: ")


def test_cli_invalid_config_exits_1(capsys):
    assert cli.main(["train", "--preset", "preset-overfit", "--batch-size", "0"]) == 1
    assert _error_line(capsys).startswith("error[config]: ")


def test_cli_numeric_failure_exits_3(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(
        "additive_unet.harness.train.charbonnier",
        lambda pred, target, epsilon: mean(scalar_mul(float("nan"), pred)),
    )
    code = cli.main(["--quiet", "train", "--preset", "preset-overfit", "--steps", "2", "--output-dir", str(tmp_path / "r")])
    assert code == 3
    assert _error_line(capsys).startswith("error[numeric]: ")


def test_cli_train_then_eval(tmp_path, capsys):
    run = tmp_path / "run"
    assert cli.main(["--quiet", "train", "--preset", "preset-overfit", "--steps", "3", "--output-dir", str(run)]) == 0
    assert cli.main(
        ["--quiet", "eval", str(run / "checkpoint.bin"), "--synth", "2", "--sigmas", "25", "--output-dir", str(tmp_path / "ev")]
    ) == 0
    assert (tmp_path / "ev" / "metrics_table.csv").exists()


def test_cli_list_presets(capsys):
    assert cli.main(["list-presets"]) == 0
    assert "preset-smoke" in capsys.readouterr().out


# =============================================================================
# Acceptance runs
# =============================================================================


@pytest.mark.slow
def test_overfit_preset_memorizes_its_patch(tmp_path):
    config = with_overrides(load_preset("preset-overfit"), {"output_dir": str(tmp_path / "overfit")})
    manifest = cmd_train(config, verbose=False)
    losses = read_loss_log(manifest.loss_log)
    assert len(losses) == 2000
    assert losses[-1][1] < 5e-3


@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("smoke")
    config = load_preset("preset-smoke")
    config.output_dir = str(out)
    return config, cmd_train(config, verbose=False)


@pytest.mark.slow
def test_smoke_preset_beats_noisy_baseline(smoke_run):
    config, manifest = smoke_run
    [entry] = manifest.final_metrics
    images = load_images(config.eval.dataset_dir, config.eval.synth)
    noisy_psnr, _ = mean_scores(evaluate_noisy(make_eval_set(images, 25.0, config.eval.seed), 25.0))
    assert entry["psnr_db"] >= noisy_psnr + 3.0


@pytest.mark.slow
def test_deepest_gate_peaks_near_learned_value(smoke_run, tmp_path):
    config, manifest = smoke_run
    learned = manifest.gates[0]
    result = cmd_sweep_alpha(
        manifest.checkpoint,
        config.eval,
        str(tmp_path),
        gate_index=0,
        low=0.0,
        high=2.0 * learned,
        steps=3,
        verbose=False,
    )
    at_zero, at_learned, at_double = result.psnr_curve
    assert not any(np.isnan(result.psnr_curve))
    assert at_learned >= at_zero
    assert at_learned >= at_double
