"""Integration tests for the three-step training schedule."""

from pathlib import Path

import pytest

from littlebird.config import ModelConfig, TrainConfig
from littlebird.exceptions import ConfigurationError
from littlebird.model import load_checkpoint
from littlebird.train import ScheduleResult, run_schedule, schedule


@pytest.fixture
def tiny_schedule() -> TrainConfig:
    """One epoch per stage on a handful of short synthetic documents."""
    return TrainConfig(
        seed=3,
        train_documents=8,
        eval_documents=4,
        short_len=32,
        long_len=64,
        teacher_epochs=1,
        distill_epochs=1,
        long_epochs=1,
        batch_size=4,
        pi_max_gap=4,
        model=ModelConfig(d_model=8, heads=2, layers=1, block_size=16, pack_size=4),
    )


@pytest.fixture(scope="module")
def default_run() -> ScheduleResult:
    """One run of the default schedule, shared by the acceptance-scale tests."""
    return run_schedule(TrainConfig())


class TestRunSchedule:
    """Tests for run_schedule."""

    def test_stages_in_order(self, tiny_schedule: TrainConfig) -> None:
        """Should log teacher, init, distill and long records in that order."""
        result = run_schedule(tiny_schedule)

        assert [r.stage for r in result.metrics.records] == ["teacher", "init", "distill", "long"]
        assert 0.0 <= result.final_accuracy <= 1.0
        assert result.student.config.vocab_size == len(result.vocab)

    def test_writes_artifacts(self, tiny_schedule: TrainConfig, tmp_path: Path) -> None:
        """Should write the metric log and both checkpoints."""
        run_schedule(tiny_schedule, tmp_path)

        lines = (tmp_path / "metrics.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "stage,epoch,step,loss,acc,seed"
        assert len(lines) == 5
        assert load_checkpoint(tmp_path / "teacher.npz").kind == "dense"
        assert load_checkpoint(tmp_path / "student.npz").kind == "littlebird"
        assert (tmp_path / "vocab.txt").is_file()

    def test_reproducible(self, tiny_schedule: TrainConfig, tmp_path: Path) -> None:
        """Should write identical metric logs for the same seed."""
        run_schedule(tiny_schedule, tmp_path / "a")
        run_schedule(tiny_schedule, tmp_path / "b")

        first = (tmp_path / "a" / "metrics.csv").read_text(encoding="utf-8")
        assert first == (tmp_path / "b" / "metrics.csv").read_text(encoding="utf-8")

    def test_corpus_without_recurring_spans(
        self, tiny_schedule: TrainConfig, temp_corpus_file
    ) -> None:
        """Should refuse a corpus with nothing to select."""
        corpus = temp_corpus_file(["a b c d e f g h .", "i j k l m n o p ."])
        config = tiny_schedule.model_copy(update={"corpus_path": corpus})

        with pytest.raises(ConfigurationError):
            run_schedule(config)

    def test_masked_tokens_use_padded_positions(self, tiny_schedule: TrainConfig, mocker) -> None:
        """Should denoise at the stretched position ids of the padded examples."""
        spy = mocker.spy(schedule, "masked_token_loss")
        config = tiny_schedule.model_copy(update={"mlm_prob": 0.15, "pi_prob": 1.0})

        run_schedule(config)

        positions = [call.args[2] for call in spy.call_args_list]
        assert positions
        assert any(int(p.ids[-1]) >= len(p) for p in positions)

    def test_teacher_loss_decreases(self) -> None:
        """Should lower the seeded teacher loss in each of the first three epochs."""
        config = TrainConfig(
            seed=0,
            train_documents=48,
            eval_documents=4,
            short_len=64,
            long_len=64,
            teacher_epochs=3,
            distill_epochs=0,
            long_epochs=0,
            batch_size=4,
            model=ModelConfig(d_model=16, heads=2, layers=1, block_size=16, pack_size=4),
        )

        result = run_schedule(config)

        losses = [r.loss for r in result.metrics.records if r.stage == "teacher"]
        assert len(losses) == 3
        assert losses[0] > losses[1] > losses[2]

    def test_attention_kl_recorded(self, tiny_schedule: TrainConfig) -> None:
        """Should measure the attention KL before and after distillation."""
        result = run_schedule(tiny_schedule)

        assert set(result.attention_kl) == {"init", "distill"}
        assert all(value >= 0.0 for value in result.attention_kl.values())


@pytest.mark.slow
class TestDefaultSchedule:
    """Acceptance-scale checks on the default schedule."""

    def test_reaches_exact_match(self, default_run: ScheduleResult) -> None:
        """Should select the held-out golden span at least 90% of the time."""
        assert default_run.final_accuracy >= 0.9

    def test_distillation_halves_attention_kl(self, default_run: ScheduleResult) -> None:
        """Should end stage 2 with at most half the attention KL of the warm start."""
        kl = default_run.attention_kl

        assert kl["init"] > 0.0
        assert kl["distill"] <= 0.5 * kl["init"]

    def test_student_keeps_teacher_accuracy(self, default_run: ScheduleResult) -> None:
        """Should lose at most two points of exact match to the teacher after stage 2."""
        teacher = default_run.stage_accuracy("teacher")

        assert default_run.stage_accuracy("distill") >= teacher - 0.02
