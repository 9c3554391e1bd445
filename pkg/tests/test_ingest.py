"""Data-plane contracts: resampling, validation, pairing, splitting,
patch files, the synthetic generator, and dataset assembly."""

from datetime import date

import numpy as np
import pytest

from magat.ingest import (BAND_ORDER, NODATA_VALUE, LabeledSample, PatchTensor,
                          SiteRecord, SynthConfig, generate_dataset,
                          pair_with_ground_truth, read_manifest, read_meta,
                          read_patch, read_site_csv, resample_band, synth_scene,
                          temporal_split, validate_patch, write_patch)


def make_patch(side=16, value=1.0, mask=None, day=date(2018, 7, 10),
               center=(44.0, 10.0), resolution=20.0):
    bands = np.full((7, side, side), value, dtype=np.float32)
    if mask is None:
        mask = np.zeros((side, side), dtype=bool)
    return PatchTensor(bands=bands, nodata_mask=mask, resolution=resolution,
                       acquisition_date=day, center=center)


def make_record(site="site0", day=date(2018, 7, 1), label=1, lat=44.0, lon=10.0):
    return SiteRecord(id=site, lat=lat, lon=lon, observation_date=day,
                      label=label, lst_day=290.0, lst_night=280.0, ssm=40.0)


class TestResample:
    def test_constant_field_downsample(self):
        band = np.full((64, 64), 5.0)
        out = resample_band(band, 10.0, 20.0)
        assert out.shape == (32, 32)
        np.testing.assert_allclose(out, 5.0, rtol=1e-12)

    def test_upsample_shape_coarse_band(self):
        out = resample_band(np.ones((16, 16)), 60.0, 20.0)
        assert out.shape == (48, 48)

    def test_identity_at_equal_resolution(self):
        band = np.arange(36.0).reshape(6, 6)
        np.testing.assert_array_equal(resample_band(band, 20.0, 20.0), band)

    def test_linear_ramp_bilinear_oracle(self):
        # a bilinear scheme reproduces an affine field exactly away from edges
        h = w = 24
        yy, xx = np.mgrid[0:h, 0:w].astype(float)
        band = 0.7 * yy + 0.3 * xx + 1.0   # strictly positive affine field
        out = resample_band(band, 30.0, 20.0)
        oh, ow = out.shape
        assert (oh, ow) == (36, 36)
        for i in range(2, oh - 2):
            for j in range(2, ow - 2):
                src_y = (i + 0.5) * 20.0 / 30.0 - 0.5
                src_x = (j + 0.5) * 20.0 / 30.0 - 0.5
                expected = 0.7 * src_y + 0.3 * src_x + 1.0
                assert abs(out[i, j] - expected) < 1e-3

    def test_nodata_excluded_from_average(self):
        band = np.full((4, 4), 3.0)
        band[0, 0] = NODATA_VALUE
        out = resample_band(band, 10.0, 20.0)
        # the corner average uses only the three valid pixels
        np.testing.assert_allclose(out, 3.0, rtol=1e-12)

    def test_nodata_propagates_when_no_valid_source(self):
        band = np.full((4, 4), 3.0)
        band[0:2, 0:2] = NODATA_VALUE
        out = resample_band(band, 10.0, 20.0)
        assert out[0, 0] == NODATA_VALUE
        np.testing.assert_allclose(out[1, 1], 3.0)

    def test_all_nodata_rejected(self):
        with pytest.raises(ValueError, match="all-NoData"):
            resample_band(np.full((4, 4), NODATA_VALUE), 10.0, 20.0)

    def test_empty_band_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            resample_band(np.zeros((0, 0)), 10.0, 20.0)


class TestValidatePatch:
    def test_clean_patch_accepted(self):
        assert validate_patch(make_patch(), 0.10).accepted

    def test_above_threshold_rejected(self):
        side = 20
        mask = np.zeros((side, side), dtype=bool)
        mask.reshape(-1)[:44] = True  # 11%
        result = validate_patch(make_patch(side=side, mask=mask), 0.10)
        assert not result.accepted
        assert "0.110" in result.reason

    def test_exactly_at_threshold_accepted(self):
        side = 20
        mask = np.zeros((side, side), dtype=bool)
        mask.reshape(-1)[:40] = True  # exactly 10%
        assert validate_patch(make_patch(side=side, mask=mask), 0.10).accepted

    def test_decision_ignores_band_values(self):
        side = 20
        mask = np.zeros((side, side), dtype=bool)
        mask.reshape(-1)[:80] = True
        a = validate_patch(make_patch(side=side, value=0.0, mask=mask), 0.10)
        b = validate_patch(make_patch(side=side, value=9.9, mask=mask), 0.10)
        assert a.accepted == b.accepted is False

    def test_masked_pixels_carry_sentinel(self):
        mask = np.zeros((16, 16), dtype=bool)
        mask[3, 4] = True
        patch = make_patch(mask=mask, value=2.0)
        assert np.all(patch.bands[:, 3, 4] == NODATA_VALUE)


class TestPairing:
    def test_nearest_record_wins(self):
        patch = make_patch(day=date(2018, 7, 10))
        records = [make_record(day=date(2018, 7, 1)),
                   make_record(day=date(2018, 8, 1))]
        samples, dropped = pair_with_ground_truth([patch], records)
        assert dropped == 0
        assert samples[0].record.observation_date == date(2018, 7, 1)

    def test_one_record_serves_many_patches(self):
        patches = [make_patch(day=date(2018, 7, 10)), make_patch(day=date(2018, 7, 20))]
        samples, _ = pair_with_ground_truth(patches, [make_record()])
        assert len(samples) == 2
        assert samples[0].record is samples[1].record

    def test_tie_breaks_toward_earlier_record(self):
        patch = make_patch(day=date(2018, 7, 10))
        records = [make_record(day=date(2018, 7, 15)),
                   make_record(day=date(2018, 7, 5))]
        samples, _ = pair_with_ground_truth([patch], records)
        assert samples[0].record.observation_date == date(2018, 7, 5)

    def test_gap_limit_drops_patch(self):
        patch = make_patch(day=date(2018, 7, 10))
        records = [make_record(day=date(2019, 7, 10))]
        samples, dropped = pair_with_ground_truth([patch], records, max_gap_days=160)
        assert samples == [] and dropped == 1

    def test_never_pairs_across_sites(self):
        patch = make_patch(center=(44.0, 10.0))
        far_record = make_record(site="far", lat=45.0, lon=11.0)
        samples, dropped = pair_with_ground_truth([patch], [far_record])
        assert samples == [] and dropped == 1

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            pair_with_ground_truth([], [make_record()])


class TestTemporalSplit:
    def _samples(self, years):
        out = []
        for i, y in enumerate(years):
            rec = make_record(site=f"s{i}", day=date(y, 6, 1))
            out.append(LabeledSample(patch=make_patch(day=date(y, 6, 3)), record=rec))
        return out

    def test_partition_by_year(self):
        samples = self._samples([2017, 2018, 2019, 2019])
        train, test = temporal_split(samples, (2017, 2018), (2019,))
        assert len(train) == 2 and len(test) == 2
        assert all(s.record.observation_date.year < 2019 for s in train)

    def test_outside_years_excluded(self):
        samples = self._samples([2016, 2017, 2019])
        train, test = temporal_split(samples, (2017, 2018), (2019,))
        assert len(train) + len(test) == 2

    def test_empty_train_split_errors(self):
        samples = self._samples([2019, 2019])
        with pytest.raises(ValueError, match="empty train"):
            temporal_split(samples, (2017, 2018), (2019,))

    def test_overlapping_years_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            temporal_split(self._samples([2018]), (2018,), (2018,))


class TestPatchFile:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(44)
        mask = rng.random((16, 16)) < 0.05
        patch = PatchTensor(bands=rng.random((7, 16, 16)).astype(np.float32),
                            nodata_mask=mask, resolution=20.0,
                            acquisition_date=date(2018, 3, 14),
                            center=(44.123456, 10.654321))
        path = tmp_path / "p.mgtp"
        write_patch(patch, path)
        loaded = read_patch(path)
        np.testing.assert_array_equal(loaded.bands, patch.bands)
        np.testing.assert_array_equal(loaded.nodata_mask, patch.nodata_mask)
        assert loaded.acquisition_date == patch.acquisition_date
        assert loaded.center == patch.center
        assert loaded.resolution == 20.0

    def test_magic_bytes(self, tmp_path):
        path = tmp_path / "p.mgtp"
        write_patch(make_patch(), path)
        assert path.read_bytes()[:4] == b"MGTP"

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.mgtp"
        path.write_bytes(b"XXXX" + bytes(64))
        with pytest.raises(ValueError, match="magic"):
            read_patch(path)


SMALL = SynthConfig(patch_side=8)


class TestSynthScene:
    def test_deterministic_bitwise(self):
        p1, r1 = synth_scene(7, 60, 0.347, config=SMALL)
        p2, r2 = synth_scene(7, 60, 0.347, config=SMALL)
        assert r1 == r2
        for a, b in zip(p1, p2):
            np.testing.assert_array_equal(a.bands, b.bands)
            np.testing.assert_array_equal(a.nodata_mask, b.nodata_mask)

    def test_positive_rate_at_reference_scale(self):
        _, records = synth_scene(3, 2264, 0.347, config=SMALL)
        rate = np.mean([r.label for r in records])
        assert abs(rate - 0.347) < 0.03

    def test_prevalence_converges(self):
        _, records = synth_scene(5, 10_000, 0.347, config=SMALL)
        rate = np.mean([r.label for r in records])
        assert abs(rate - 0.347) < 0.02

    def test_zero_signal_labels_independent_of_bands(self):
        # permutation oracle: a least-squares classifier on band means
        # should do no better on true labels than on permuted ones
        patches, records = synth_scene(11, 600, 0.4, signal_strength=0.0, config=SMALL)
        x = np.stack([p.bands.reshape(7, -1).mean(axis=1) for p in patches])
        x = (x - x.mean(0)) / (x.std(0) + 1e-9)
        y = np.array([r.label for r in records], dtype=float)

        def half_split_accuracy(labels, seed):
            rng = np.random.default_rng(seed)
            idx = rng.permutation(len(labels))
            tr, te = idx[:300], idx[300:]
            w, *_ = np.linalg.lstsq(np.c_[x[tr], np.ones(300)], labels[tr], rcond=None)
            pred = np.c_[x[te], np.ones(300)] @ w > 0.5
            return np.mean(pred == labels[te])

        acc_real = half_split_accuracy(y, 0)
        acc_perm = np.mean([
            half_split_accuracy(np.random.default_rng(100 + i).permutation(y), 0)
            for i in range(5)])
        assert abs(acc_real - acc_perm) < 0.08

    def test_nonzero_signal_is_learnable_from_bands(self):
        patches, records = synth_scene(11, 600, 0.4, signal_strength=6.0, config=SMALL)
        x = np.stack([p.bands.reshape(7, -1).mean(axis=1) for p in patches])
        x = (x - x.mean(0)) / (x.std(0) + 1e-9)
        y = np.array([r.label for r in records], dtype=float)
        w, *_ = np.linalg.lstsq(np.c_[x, np.ones(len(y))], y, rcond=None)
        pred = np.c_[x, np.ones(len(y))] @ w > 0.5
        # own-site bands explain part of the planted risk
        assert np.mean(pred == y) > 0.6

    def test_site_count_floor(self):
        with pytest.raises(ValueError, match="at least 20"):
            synth_scene(1, 10, 0.3, config=SMALL)

    def test_region_capacity(self):
        tiny = SynthConfig(lat_range=(44.0, 44.02), lon_range=(10.0, 10.02), patch_side=8)
        with pytest.raises(ValueError, match="region too small"):
            synth_scene(1, 5000, 0.3, config=tiny)

    def test_records_well_formed(self):
        _, records = synth_scene(2, 100, 0.35, config=SMALL)
        years = {r.observation_date.year for r in records}
        assert years <= {2017, 2018, 2019}
        assert all(0.0 <= r.ssm <= 100.0 for r in records)


class TestGenerateDataset:
    def test_layout_and_tags(self, tmp_path):
        manifest = generate_dataset(tmp_path, seed=9, n_sites=80,
                                    positive_rate=0.4, config=SMALL)
        assert (tmp_path / "sites.csv").exists()
        assert (tmp_path / "manifest.tsv").exists()
        assert (tmp_path / "dataset.meta").exists()
        tags = {e.split for e in manifest.entries}
        assert tags == {"train", "test"}
        loaded = read_manifest(tmp_path / "manifest.tsv")
        assert len(loaded.entries) == len(manifest.entries)
        # every listed patch exists, loads, and references a known site
        sites = {r.id for r in read_site_csv(tmp_path / "sites.csv")}
        for entry in manifest.entries[:5]:
            patch = read_patch(tmp_path / entry.patch_path)
            assert patch.side == 8
            assert entry.site_id in sites

    def test_meta_counts(self, tmp_path):
        manifest = generate_dataset(tmp_path, seed=9, n_sites=80,
                                    positive_rate=0.4, config=SMALL)
        meta = read_meta(tmp_path / "dataset.meta")
        assert int(meta["count_positive"]) + int(meta["count_negative"]) == \
            len(manifest.entries)
        assert meta["seed"] == "9"

    def test_sites_csv_roundtrip(self, tmp_path):
        generate_dataset(tmp_path, seed=9, n_sites=80, positive_rate=0.4, config=SMALL)
        records = read_site_csv(tmp_path / "sites.csv")
        assert len(records) == 80
        assert all(isinstance(r.label, int) for r in records)
