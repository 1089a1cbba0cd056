import pytest

from fracstefan.config import CONFIGURACAO, nivel_de_log_do_ambiente


class TestNivelDeLog:
    @pytest.mark.parametrize("valor, esperado", [("debug", "DEBUG"), (" warning ", "WARNING"), ("ERROR", "ERROR")])
    def test_valido(self, monkeypatch, valor, esperado):
        monkeypatch.setenv("FRACSTEFAN_LOG_LEVEL", valor)
        assert nivel_de_log_do_ambiente() == (esperado, True)

    @pytest.mark.parametrize("valor", ["VERBOSE", "", "10"])
    def test_invalido_cai_para_info(self, monkeypatch, valor):
        monkeypatch.setenv("FRACSTEFAN_LOG_LEVEL", valor)
        assert nivel_de_log_do_ambiente() == ("INFO", False)

    def test_ausente(self, monkeypatch):
        monkeypatch.delenv("FRACSTEFAN_LOG_LEVEL", raising=False)
        assert nivel_de_log_do_ambiente() == ("INFO", True)


def test_graduacao_padrao():
    assert CONFIGURACAO.graduacao_maxima == 8.0
