import math

import numpy as np
import pytest

import embolt.samplers
from embolt.datasets import (LogicalDataset, SKInstance, corrupt_salt_pepper,
                             gen_sk, sk_sample)
from embolt.embedding import Embedding
from embolt.errors import InputError, ParseError
from embolt.evaluation import (INDETERMINATE, EvalReport, classify,
                               classify_set, lambda_av, load_pbm, mistake_rate,
                               parse_pbm, reconstruct, reconstruct_set,
                               relative_entropy, render_pbm, save_report)
from embolt.model import IsingModel, init_model
from embolt.samplers import SamplerConfig, SampleSet, exact_sample
from embolt.topology import complete_graph


def exact(seed=0, **kw):
    return SamplerConfig(kind="exact", seed=seed, **kw)


class TestLambdaAv:
    def test_uniform_generator(self):
        inst = gen_sk(15, 0.0, seed=0)
        rows = np.random.default_rng(1).choice([-1, 1], size=(20, 15))
        assert lambda_av(inst, rows) == pytest.approx(-15 * math.log(2))

    def test_two_spin_closed_form(self):
        inst = SKInstance(2, 1.0, 0, np.array([1.0]))
        val = lambda_av(inst, np.array([[1, 1]]))
        assert val == pytest.approx(1.0 - math.log(2 * math.e + 2 / math.e))
        worst = lambda_av(inst, np.array([[1, -1]]))
        assert worst == pytest.approx(-1.0 - math.log(2 * math.e + 2 / math.e))

    def test_mixture_averages_rows(self):
        inst = SKInstance(2, 1.0, 0, np.array([1.0]))
        a = lambda_av(inst, np.array([[1, 1]]))
        b = lambda_av(inst, np.array([[1, -1]]))
        both = lambda_av(inst, np.array([[1, 1], [1, -1]]))
        assert both == pytest.approx((a + b) / 2)

    def test_concentrates_over_independent_draws(self):
        inst = gen_sk(12, 2.0, seed=8)
        s1 = sk_sample(inst, 500, seed=1)
        s2 = sk_sample(inst, 500, seed=2)
        q = inst.to_model()
        per_row = -inst.beta * q.energy(s1.rows.astype(float)) - inst.log_z()
        se = per_row.std() / math.sqrt(500)
        assert abs(lambda_av(inst, s1) - lambda_av(inst, s2)) < 4 * se * 1.5

    def test_accepts_dataset_and_single_row(self):
        inst = gen_sk(5, 0.0, seed=0)
        ds = LogicalDataset(np.ones((3, 5), dtype=np.int8))
        assert lambda_av(inst, ds) == pytest.approx(-5 * math.log(2))
        assert lambda_av(inst, np.ones(5)) == pytest.approx(-5 * math.log(2))

    def test_rejects_width_mismatch_and_empty(self):
        inst = gen_sk(5, 1.0, seed=0)
        with pytest.raises(InputError):
            lambda_av(inst, np.ones((2, 4)))
        with pytest.raises(InputError):
            lambda_av(inst, np.ones((0, 5)))


class TestRelativeEntropy:
    def test_zero_for_exactly_matched_counts(self):
        # P(+1) = 3/4 at h = ln(3)/2, so 3:1 data hits it exactly
        m = IsingModel(complete_graph(1), h=[math.log(3) / 2])
        data = np.array([[1], [1], [1], [-1]])
        assert relative_entropy(data, m, beta=1.0) == pytest.approx(0.0,
                                                                    abs=1e-12)

    def test_zero_for_uniform_match(self):
        m = IsingModel(complete_graph(2))
        data = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]])
        assert relative_entropy(data, m, beta=1.0) == pytest.approx(0.0,
                                                                    abs=1e-12)

    def test_point_mass_against_uniform(self):
        m = IsingModel(complete_graph(3))
        data = np.tile([1, -1, 1], (10, 1))
        assert relative_entropy(data, m, beta=1.0) == \
            pytest.approx(3 * math.log(2))

    def test_nonnegative(self):
        rng = np.random.default_rng(4)
        for trial in range(5):
            m = init_model(complete_graph(4), seed=trial, scale=0.8)
            data = rng.choice([-1, 1], size=(30, 4))
            assert relative_entropy(data, m, beta=1.0) > -1e-12

    def test_gamma_zero_matches_classical(self):
        m = init_model(complete_graph(3), seed=2, scale=0.6)
        data = np.random.default_rng(7).choice([-1, 1], size=(40, 3))
        classical = relative_entropy(data, m, beta=1.2)
        quantum = relative_entropy(data, m, beta=1.2, gamma=0.0)
        assert quantum == pytest.approx(classical, abs=1e-8)

    def test_transverse_field_changes_the_score(self):
        m = init_model(complete_graph(3), seed=2, scale=0.6)
        data = np.random.default_rng(7).choice([-1, 1], size=(40, 3))
        a = relative_entropy(data, m, beta=1.0, gamma=0.0)
        b = relative_entropy(data, m, beta=1.0, gamma=2.0)
        assert abs(a - b) > 1e-3

    def test_rejects_width_mismatch(self):
        m = IsingModel(complete_graph(3))
        with pytest.raises(InputError):
            relative_entropy(np.ones((2, 2)), m, beta=1.0)


class TestReconstruct:
    def pair_setup(self, j=0.9):
        g = complete_graph(2)
        return IsingModel(g, J=[j]), Embedding.identity(g)

    def test_empty_mask_is_identity(self):
        m, e = self.pair_setup()
        pic = np.array([1, -1], dtype=np.int8)
        out, ties = reconstruct(m, e, pic, np.zeros(2, dtype=np.int8),
                                exact(), votes=5)
        assert np.array_equal(out, pic)
        assert ties == 0

    def test_strong_coupling_completes_the_pair(self):
        m, e = self.pair_setup(j=0.9)
        for known in (1, -1):
            pic = np.array([known, -known], dtype=np.int8)   # truth withheld
            out, _ = reconstruct(m, e, pic, np.array([0, 1]), exact(seed=3),
                                 votes=101)
            assert out[0] == known
            assert out[1] == known      # ferromagnetic pull wins

    def test_tie_falls_back_to_dark(self):
        g = complete_graph(2)
        m = IsingModel(g)
        e = Embedding.identity(g)
        out, ties = reconstruct(m, e, np.array([1, 1]), np.array([0, 1]),
                                exact(seed=0), votes=2)
        assert ties == 1
        assert out[1] == -1

    def test_never_alters_unmasked_pixels(self):
        g = complete_graph(6)
        m = init_model(g, seed=1, scale=0.5)
        e = Embedding.identity(g)
        ds = LogicalDataset(
            np.random.default_rng(2).choice([-1, 1], size=(4, 6)))
        corrupted, mask = corrupt_salt_pepper(ds, 0.5, seed=3)
        out, _ = reconstruct_set(m, e, corrupted, mask, exact(), votes=9)
        assert np.array_equal(out[mask == 0], corrupted.rows[mask == 0])

    def test_untrained_model_guesses_at_chance(self):
        g = complete_graph(8)
        m = IsingModel(g)                       # all parameters zero
        e = Embedding.identity(g)
        rng = np.random.default_rng(5)
        ds = LogicalDataset(rng.choice([-1, 1], size=(30, 8)))
        corrupted, mask = corrupt_salt_pepper(ds, 0.5, seed=6)
        out, _ = reconstruct_set(m, e, corrupted, mask, exact(seed=7),
                                 votes=9)
        _, frac = mistake_rate(ds.rows, out, mask)
        assert 0.35 < frac < 0.65

    def test_per_picture_seeds_differ(self):
        g = complete_graph(4)
        m = IsingModel(g)
        e = Embedding.identity(g)
        rows = np.ones((6, 4), dtype=np.int8)
        mask = np.tile([0, 1, 1, 1], (6, 1)).astype(np.int8)
        out, _ = reconstruct_set(m, e, rows, mask, exact(seed=1), votes=3)
        assert len({tuple(r) for r in out}) > 1

    def test_rejects_shape_mismatch(self):
        m, e = self.pair_setup()
        with pytest.raises(InputError):
            reconstruct(m, e, np.ones(3), np.zeros(3), exact())
        with pytest.raises(InputError):
            reconstruct_set(m, e, np.ones((2, 2)), np.zeros((3, 2)), exact())


class TestMistakeRate:
    def test_perfect(self):
        truth = np.ones((2, 4))
        assert mistake_rate(truth, truth.copy(), np.ones((2, 4))) == (0.0, 0.0)

    def test_all_wrong_inside_mask(self):
        truth = np.ones((2, 4))
        recon = truth.copy()
        mask = np.zeros((2, 4))
        mask[:, :2] = 1
        recon[mask == 1] *= -1
        assert mistake_rate(truth, recon, mask) == (2.0, 1.0)

    def test_counts_only_masked_cells(self):
        truth = np.array([[1, 1, 1], [1, 1, 1]])
        recon = np.array([[-1, 1, -1], [1, 1, -1]])
        mask = np.array([[1, 0, 1], [0, 0, 1]])
        mean, frac = mistake_rate(truth, recon, mask)
        assert mean == pytest.approx(1.5)      # 3 wrong over 2 pictures
        assert frac == pytest.approx(1.0)
        # the unmasked flip at (0,0)? it is masked; (1,0) unmasked and right
        recon2 = recon.copy()
        recon2[0, 1] = -1                      # wrong but unmasked
        assert mistake_rate(truth, recon2, mask) == (1.5, 1.0)

    def test_empty_mask(self):
        truth = np.ones((2, 2))
        assert mistake_rate(truth, -truth, np.zeros((2, 2))) == (0.0, 0.0)

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            mistake_rate(np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 3)))


def canned_votes(e, class_rows):
    """A sampler stub returning prebuilt class-variable vote rows."""
    def fake(model, cfg):
        rows = np.ones((len(class_rows), e.n_physical), dtype=np.int8)
        for q, v in (cfg.clamp or {}).items():
            rows[:, e._qpos[q]] = v
        n_class = len(class_rows[0])
        for i, pattern in enumerate(class_rows):
            rows[i, -n_class:] = pattern
        return SampleSet(rows, e.qubit_order.copy(), cfg)
    return fake


class TestClassify:
    def setup_identity(self, n_pixels=2, n_classes=3):
        g = complete_graph(n_pixels + n_classes)
        e = Embedding.identity(g)
        m = IsingModel(g)
        class_vars = list(range(n_pixels, n_pixels + n_classes))
        return m, e, class_vars

    def test_unanimous(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[-1, 1, -1]] * 10
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        pred, counts = classify(m, e, np.array([1, -1]), cv, exact())
        assert pred == 1
        assert list(counts) == [0, 10, 0]

    def test_plurality(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[1, -1, -1]] * 40 + [[-1, 1, -1]] * 60
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        pred, counts = classify(m, e, np.array([1, -1]), cv, exact())
        assert pred == 1
        assert list(counts) == [40, 60, 0]

    def test_invalid_votes_are_ignored(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = ([[1, 1, -1]] * 30          # two winners: invalid
                 + [[-1, -1, -1]] * 30      # no winner: invalid
                 + [[-1, -1, 1]] * 5)
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        pred, counts = classify(m, e, np.array([1, -1]), cv, exact())
        assert pred == 2
        assert list(counts) == [0, 0, 5]

    def test_all_invalid_is_indeterminate(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[1, 1, 1]] * 8
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        pred, counts = classify(m, e, np.array([1, -1]), cv, exact())
        assert pred == INDETERMINATE
        assert list(counts) == [0, 0, 0]

    def test_count_tie_prefers_earlier_position(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[1, -1, -1]] * 5 + [[-1, 1, -1]] * 5
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        pred, _ = classify(m, e, np.array([1, -1]), cv, exact())
        assert pred == 0

    def test_vote_order_is_irrelevant(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[1, -1, -1]] * 3 + [[-1, 1, -1]] * 7
        shuffled = list(votes)
        np.random.default_rng(0).shuffle(shuffled)
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        a = classify(m, e, np.array([1, -1]), cv, exact())
        monkeypatch.setattr(embolt.samplers, "sample",
                            canned_votes(e, shuffled))
        b = classify(m, e, np.array([1, -1]), cv, exact())
        assert a[0] == b[0] and list(a[1]) == list(b[1])

    def test_real_sampler_follows_couplings(self):
        # pixel i is ferromagnetically tied to class var i
        g = complete_graph(4)
        m = IsingModel(g)
        m.J[g.edge_index(0, 2)] = 0.9
        m.J[g.edge_index(1, 3)] = 0.9
        e = Embedding.identity(g)
        pred, _ = classify(m, e, np.array([1, -1]), [2, 3], exact(seed=2),
                           votes=151)
        assert pred == 0
        pred, _ = classify(m, e, np.array([-1, 1]), [2, 3], exact(seed=2),
                           votes=151)
        assert pred == 1

    def test_picture_width_variants(self, monkeypatch):
        m, e, cv = self.setup_identity()
        votes = [[-1, 1, -1]] * 4
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        full = classify(m, e, np.array([1, -1, 1, 1, 1]), cv, exact())
        bare = classify(m, e, np.array([1, -1]), cv, exact())
        assert full[0] == bare[0] == 1
        with pytest.raises(InputError):
            classify(m, e, np.array([1, -1, 1]), cv, exact())

    def test_classify_set_maps_labels_positionally(self, monkeypatch):
        m, e, cv = self.setup_identity(n_pixels=2, n_classes=2)

        def fake(model, cfg):
            rows = np.ones((6, e.n_physical), dtype=np.int8)
            for q, v in (cfg.clamp or {}).items():
                rows[:, e._qpos[q]] = v
            hot = 1 if rows[0, 0] == 1 else 0
            rows[:, 2:] = -1
            rows[:, 2 + hot] = 1
            return SampleSet(rows, e.qubit_order.copy(), cfg)

        monkeypatch.setattr(embolt.samplers, "sample", fake)
        ds = LogicalDataset(np.array([[1, 1], [-1, 1], [1, -1]]),
                            labels=[7, 3, 7])
        preds, acc, confusion = classify_set(m, e, ds, cv, exact())
        # labels sort to [3, 7]: 3 is position 0, 7 is position 1
        assert list(preds) == [1, 0, 1]
        assert acc == 1.0
        assert confusion == {(1, 1): 2, (0, 0): 1}

    def test_classify_set_counts_abstentions(self, monkeypatch):
        m, e, cv = self.setup_identity(n_pixels=2, n_classes=2)
        votes = [[1, 1]] * 4
        monkeypatch.setattr(embolt.samplers, "sample", canned_votes(e, votes))
        ds = LogicalDataset(np.array([[1, 1]]), labels=[2])
        preds, acc, confusion = classify_set(m, e, ds, cv, exact())
        assert list(preds) == [INDETERMINATE]
        assert acc == 0.0
        assert confusion == {(0, INDETERMINATE): 1}


class TestEvalReport:
    def test_kv_skips_unset_fields(self):
        rep = EvalReport(accuracy=0.75, ties=3)
        text = rep.to_kv()
        assert "accuracy = 0.75" in text
        assert "ties = 3" in text
        assert "lambda_av" not in text

    def test_confusion_lines_sorted(self):
        rep = EvalReport(confusion={(1, 0): 2, (0, 1): 5})
        lines = rep.to_kv().splitlines()
        assert lines == ["confusion_0_1 = 5", "confusion_1_0 = 2"]

    def test_save(self, tmp_path):
        p = tmp_path / "r.txt"
        save_report(EvalReport(mistakes_mean=1.5), p)
        assert p.read_text() == "mistakes_mean = 1.5\n"

    def test_text_variant_uses_tabs(self):
        assert EvalReport(ties=1).to_text() == "ties\t1\n"


class TestBitmaps:
    def test_all_white(self, tmp_path):
        p = tmp_path / "w.pbm"
        written = render_pbm(-np.ones((1, 6), dtype=np.int8), (2, 3), p)
        assert written == [str(p)]
        text = p.read_text()
        assert text.startswith("P1\n3 2\n")
        assert set(text.split("\n", 2)[2].split()) == {"0"}

    def test_round_trip_single_picture(self, tmp_path):
        rng = np.random.default_rng(3)
        pic = rng.choice([-1, 1], size=(1, 12)).astype(np.int8)
        p = tmp_path / "x.pbm"
        render_pbm(pic, (3, 4), p)
        back = load_pbm(p)
        assert np.array_equal(back, pic.reshape(3, 4))

    def test_grid_layout_36_pictures(self, tmp_path):
        pics = np.ones((36, 4), dtype=np.int8)
        p = tmp_path / "grid.pbm"
        render_pbm(pics, (2, 2), p)
        back = load_pbm(p)
        assert back.shape == (12, 12)
        assert np.all(back == 1)

    def test_partial_grid_pads_white(self, tmp_path):
        pics = np.ones((5, 4), dtype=np.int8)
        p = tmp_path / "padded.pbm"
        render_pbm(pics, (2, 2), p)
        back = load_pbm(p)
        assert back.shape == (4, 6)             # 2 rows x 3 cols of 2x2 cells
        assert np.all(back[2:, 4:] == -1)       # unused slot stays white

    def test_ties_write_gray_companion(self, tmp_path):
        pics = np.array([[1, 0, -1, 1]], dtype=np.int8)
        p = tmp_path / "t.pbm"
        written = render_pbm(pics, (2, 2), p, tie=-1)
        assert written == [str(p), str(p) + ".pgm"]
        back = load_pbm(p)
        assert back[0, 1] == -1                 # tie rendered with the fallback
        gray = (tmp_path / "t.pbm.pgm").read_text().split()
        assert gray[0] == "P2"
        assert gray[4:] == ["2", "1", "0", "2"]

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_pbm("P4\n1 1\n0\n")
        with pytest.raises(ParseError):
            parse_pbm("P1\n2 1\n0\n")
        with pytest.raises(ParseError):
            parse_pbm("P1\n1 1\n3\n")

    def test_pixel_count_mismatch_rejected(self, tmp_path):
        with pytest.raises(InputError):
            render_pbm(np.ones((1, 5)), (2, 2), tmp_path / "bad.pbm")
