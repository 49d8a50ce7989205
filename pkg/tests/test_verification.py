import pytest

from fracvp import bounds, verification
from fracvp.errors import BracketError
from fracvp.fracops import OrderPair
from fracvp.verification import Verifier, crossing_offsets, kernel_majorized, run_verification, sign_changes


class TestHelpers:
    def test_sign_changes_single_crossing(self):
        crossings = sign_changes(OrderPair.fractional(1.8, 0.4), -1.0, 1.0, 2000)
        assert len(crossings) == 1
        assert 0.0 < crossings[0] < 1.0

    def test_crossing_next_to_b_is_resolved(self):
        orders = OrderPair.fractional(1.555, 0.03984)
        a, b = -0.8373, 2.0433
        offsets = crossing_offsets(orders, a, b, 10_000)
        assert len(offsets) == 1
        assert 0.0 < offsets[0] < 1e-6
        assert offsets[0] == pytest.approx(b - bounds.crossing_point(orders, a, b), rel=0.1)

    def test_crossing_below_double_spacing_at_b(self):
        # (b-a) 2^(-1/beta) is about 1e-30 here
        offsets = crossing_offsets(OrderPair.fractional(1.2, 0.01), 0.0, 1.0, 10_000)
        assert len(offsets) == 1
        assert 0.0 < offsets[0] < 1e-25

    def test_kernel_majorized(self):
        assert kernel_majorized(OrderPair.fractional(1.7, 0.3), 0.0, 2.0, 30)


class TestVerifier:
    def test_cheap_checks_pass(self, config_manager):
        verifier = Verifier(config_manager)
        for check in (verifier.check_alpha_bar, verifier.check_ml_anchor, verifier.check_classical_consistency,
                      verifier.check_vp_recovery):
            passed, detail = check()
            assert passed, detail

    def test_failures_are_recorded(self, config_manager, monkeypatch):
        def broken(self):
            raise BracketError("no sign change")
        monkeypatch.setattr(Verifier, 'check_alpha_bar', broken)
        monkeypatch.setattr(Verifier, 'checks', lambda self: [
            ('alpha_bar', self.check_alpha_bar),
            ('ml_anchor_pi_squared', self.check_ml_anchor),
        ])
        summary = run_verification(config_manager)
        assert summary['passed'] == 1
        assert summary['failed'] == 1
        assert summary['checks'][0] == {
            'name': 'alpha_bar', 'passed': False, 'detail': 'bracket_error: no sign change'
        }

    def test_check_names(self, config_manager):
        names = [name for name, _ in Verifier(config_manager).checks()]
        assert len(names) == len(set(names))
        assert 'fractional_radius_sweep' in names

    def test_alpha_lists(self):
        assert verification.CLASSICAL_ALPHAS[0] == 1.1
        assert verification.CLASSICAL_ALPHAS[-1] == 2.0
        assert len(verification.CLASSICAL_ALPHAS) == 10
        assert 1.44 in verification.IMPROVED_ALPHAS

    @pytest.mark.slow
    def test_full_suite(self, config_manager):
        summary = run_verification(config_manager)
        failed = [c for c in summary['checks'] if not c['passed']]
        assert summary['failed'] == 0, failed
