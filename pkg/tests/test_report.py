import json

import numpy as np
import pytest

from fracvp.bounds import Branch
from fracvp.report import emit_csv, emit_json, emit_plain


class TestEmitJson:
    def test_scalars(self):
        text = emit_json({'a': 1.5, 'b': None, 'c': [1, True, 'x'], 'd': float('nan'), 'e': -float('inf')})
        assert text == '{"a": 1.5, "b": null, "c": [1, true, "x"], "d": null, "e": null}'

    def test_full_precision(self):
        text = emit_json({'x': 0.1, 'y': 1.0 / 3.0})
        assert text == '{"x": 0.10000000000000001, "y": 0.33333333333333331}'
        parsed = json.loads(text)
        assert parsed == {'x': 0.1, 'y': 1.0 / 3.0}
        assert emit_json(parsed) == text

    def test_keeps_key_order(self):
        assert emit_json({'z': 1, 'a': 2}) == '{"z": 1, "a": 2}'

    def test_numpy_and_enum_values(self):
        assert emit_json([np.float64(2.5), np.int64(3), Branch.G_SECOND_INTEGRAL]) == \
            '[2.5, 3, "g_second_integral"]'

    def test_rejects_unknown_types(self):
        with pytest.raises(TypeError):
            emit_json({'x': object()})


class TestEmitPlain:
    def test_flattens(self):
        text = emit_plain({'a': {'b': 1}, 'c': [2.5, 'x'], 'd': None, 'e': False})
        assert text.split('\n') == ['a.b=1', 'c[0]=2.5', 'c[1]=x', 'd=null', 'e=false']


class TestEmitCsv:
    def test_rows(self):
        text = emit_csv([{'x': 1, 'y': None}, {'x': 0.5, 'y': True, 'z': 9}], ['x', 'y'])
        assert text == 'x,y\n1,\n0.5,true\n'

    def test_quotes_commas(self):
        text = emit_csv([{'name': 'a', 'detail': 'one, two'}], ['name', 'detail'])
        assert text == 'name,detail\na,"one, two"\n'
