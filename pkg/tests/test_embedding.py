import itertools

import numpy as np
import pytest

from embolt import embedding as em
from embolt.embedding import (Embedding, clique_embed, embedding_stats,
                              load_embedding, save_embedding)
from embolt.errors import (BrokenQubitError, DisconnectedChainError,
                           EmbeddingError, InputError, OverlapError,
                           ParseError, UnknownQubitError)
from embolt.topology import ChimeraSpec, build_chimera, complete_graph

from chain_layouts import fifteen_chain_layout, forty_six_chain_layout, masked_chip
from oracles import full_coverage, pair_coverage


def cell():
    return build_chimera(ChimeraSpec(1, 1, 4))


class TestEmbeddingBasics:
    def test_identity_round_trip(self):
        g = complete_graph(5)
        emb = Embedding.identity(g)
        assert emb.n_logical == 5 and emb.n_physical == 5
        x = np.array([1, -1, 1, 1, -1], dtype=np.int8)
        assert np.array_equal(emb.encode(x), x)
        assert np.array_equal(emb.decode(x), x)

    def test_encode_replicates_over_chains(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        out = emb.encode(np.array([1, -1]))
        assert list(out) == [1, 1, -1, -1, -1]

    def test_encode_batched(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        rows = np.array([[1, -1], [-1, 1]])
        out = emb.encode(rows)
        assert out.shape == (2, 5)
        assert list(out[1]) == [-1, -1, 1, 1, 1]

    def test_decode_majority_vote(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        out = emb.decode(np.array([1, 1, -1, 1, -1]))
        assert list(out) == [1, -1]

    def test_decode_tie_marks_zero(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        out = emb.decode(np.array([1, -1, 1, 1, 1]))
        assert list(out) == [0, 1]
        out = emb.decode(np.array([1, -1, 1, 1, 1]), fallback=-1)
        assert list(out) == [-1, 1]

    def test_decode_inverts_encode_exhaustively(self):
        emb = clique_embed(build_chimera(ChimeraSpec(3, 3, 4)), 10)
        rows = np.array(list(itertools.product((1, -1), repeat=10)),
                        dtype=np.int8)
        assert np.array_equal(emb.decode(emb.encode(rows)), rows)

    def test_qubit_order_is_sorted_union(self):
        emb = Embedding(cell(), [[5, 0], [1, 6]])
        assert list(emb.qubit_order) == [0, 1, 5, 6]
        assert emb.chain_of[5] == 0 and emb.chain_of[6] == 1

    def test_clamp_map_expands_chains(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        assert emb.clamp_map({1: -1}) == {2: -1, 3: -1, 4: -1}
        assert emb.clamp_map({0: 1, 1: -1}) == {0: 1, 1: 1, 2: -1, 3: -1, 4: -1}

    def test_clamp_map_rejects_bad_values(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        with pytest.raises(InputError):
            emb.clamp_map({0: 0})
        with pytest.raises(InputError):
            emb.clamp_map({7: 1})

    def test_shape_mismatch_rejected(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        with pytest.raises(InputError):
            emb.encode(np.ones(3))
        with pytest.raises(InputError):
            emb.decode(np.ones(4))

    def test_induced_graph_restricts_to_union(self):
        g = cell()
        emb = Embedding(g, [[0, 4], [1, 5]])
        sub = emb.induced_graph()
        assert sorted(int(v) for v in sub.vertices) == [0, 1, 4, 5]
        assert sub.n_edges == 4    # the K_{2,2} between the used shores


class TestValidation:
    def test_overlap(self):
        with pytest.raises(OverlapError):
            Embedding(cell(), [[0, 4], [4, 1]])

    def test_disconnected_chain(self):
        # same shore, no internal couplers
        with pytest.raises(DisconnectedChainError):
            Embedding(cell(), [[0, 1]])

    def test_broken_qubit_named(self):
        g = build_chimera(ChimeraSpec(1, 1, 4, frozenset({3})))
        with pytest.raises(BrokenQubitError):
            Embedding(g, [[3]])

    def test_unknown_qubit(self):
        with pytest.raises(UnknownQubitError):
            Embedding(cell(), [[99]])

    def test_empty_chain(self):
        with pytest.raises(EmbeddingError):
            Embedding(cell(), [[0, 4], []])

    def test_repeated_qubit_within_chain(self):
        with pytest.raises(EmbeddingError):
            Embedding(cell(), [[0, 4, 0]])

    def test_no_chains(self):
        with pytest.raises(EmbeddingError):
            Embedding(cell(), [])


class TestCliqueEmbed:
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
    def test_all_pairs_on_square_lattices(self, m):
        g = build_chimera(ChimeraSpec(m, m, 4))
        emb = clique_embed(g, 4 * m)
        assert emb.n_logical == 4 * m
        assert max(emb.chain_sizes()) <= m + 1
        assert full_coverage(emb)

    def test_single_variable(self):
        emb = clique_embed(cell(), 1)
        assert emb.n_logical == 1
        assert emb.chain_sizes() == [2]

    def test_partial_shore(self):
        # 6 variables on a 2x2 region: coverage must still be complete
        g = build_chimera(ChimeraSpec(2, 2, 4))
        emb = clique_embed(g, 6)
        assert full_coverage(emb)
        assert max(emb.chain_sizes()) <= 3

    def test_largest_clique_on_full_device(self):
        g = build_chimera(ChimeraSpec(12, 12, 4))
        emb = clique_embed(g, 48)
        assert emb.n_physical == 48 * 13
        assert set(emb.chain_sizes()) == {13}
        assert full_coverage(emb)

    def test_region_too_small(self):
        with pytest.raises(InputError):
            clique_embed(build_chimera(ChimeraSpec(2, 2, 4)), 9)

    def test_requires_lattice(self):
        with pytest.raises(InputError):
            clique_embed(complete_graph(8), 4)

    def test_broken_qubit_in_region_detected(self):
        g = build_chimera(ChimeraSpec(2, 2, 4, frozenset({0})))
        with pytest.raises(BrokenQubitError):
            clique_embed(g, 8)


class TestStats:
    def test_identity_on_complete_graph(self):
        stats = embedding_stats(Embedding.identity(complete_graph(4)))
        assert stats.n_logical == 4 and stats.n_physical == 4
        assert stats.min_chain == stats.max_chain == 1
        assert stats.usage == 1.0
        assert stats.couplers == 6
        assert stats.logical_params == 10
        assert stats.physical_params == 10

    def test_row_formatting(self):
        stats = embedding_stats(clique_embed(cell(), 4))
        assert stats.row() == "4\t8\t2\t2\t100%\t10\t24"

    def test_fifteen_chain_layout_stats(self):
        emb = Embedding(masked_chip(), fifteen_chain_layout())
        stats = embedding_stats(emb)
        assert (stats.n_physical, stats.min_chain, stats.max_chain) == (76, 5, 6)
        assert stats.couplers == 176
        assert stats.row() == "15\t76\t5\t6\t7%\t120\t252"

    def test_forty_six_chain_layout_stats(self):
        emb = Embedding(masked_chip(), forty_six_chain_layout())
        stats = embedding_stats(emb)
        assert (stats.n_physical, stats.min_chain, stats.max_chain) == (940, 12, 28)
        assert stats.couplers == 2449
        assert stats.row() == "46\t940\t12\t28\t86%\t1081\t3389"

    def test_masked_chip_counts(self):
        g = masked_chip()
        assert g.n_vertices == 1097
        assert g.n_edges == 3193


class TestSerialization:
    def test_round_trip(self, tmp_path):
        g = build_chimera(ChimeraSpec(2, 2, 4))
        emb = clique_embed(g, 8)
        path = tmp_path / "e.emb"
        save_embedding(emb, path)
        back = load_embedding(g, path)
        assert back.chains == emb.chains

    def test_dump_mentions_every_chain(self):
        emb = Embedding(complete_graph(5), [[0, 1], [2, 3, 4]])
        text = em.dump_embedding(emb)
        assert "chain 0: 0 1" in text
        assert "chain 1: 2 3 4" in text

    def test_parse_rejects_duplicates(self, tmp_path):
        p = tmp_path / "e.emb"
        p.write_text("chain 0: 0 4\nchain 0: 1 5\n")
        with pytest.raises(ParseError):
            load_embedding(cell(), p)

    def test_parse_rejects_gap_in_indices(self, tmp_path):
        p = tmp_path / "e.emb"
        p.write_text("chain 0: 0 4\nchain 2: 1 5\n")
        with pytest.raises(ParseError):
            load_embedding(cell(), p)

    def test_parse_rejects_garbage_with_line(self, tmp_path):
        p = tmp_path / "e.emb"
        p.write_text("chain 0: 0 4\nnot a chain\n")
        with pytest.raises(ParseError) as err:
            load_embedding(cell(), p)
        assert err.value.line == 2

    def test_parse_validates_against_graph(self, tmp_path):
        p = tmp_path / "e.emb"
        p.write_text("chain 0: 0 1\n")
        with pytest.raises(DisconnectedChainError):
            load_embedding(cell(), p)

    def test_comments_ignored(self, tmp_path):
        p = tmp_path / "e.emb"
        p.write_text("# header\nchain 0: 0 4   # an L\n")
        emb = load_embedding(cell(), p)
        assert emb.chains == [(0, 4)]
