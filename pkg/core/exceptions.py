"""
Dimple Trap - Exceptions

Kütüphane genelinde kullanılan hata sınıfları.
Parametre/tanım hataları ValueError'dan, sayısal başarısızlıklar
RuntimeError'dan türer.
"""


class DimpleError(Exception):
    """Base class for all library errors"""


class SpecialFunctionError(DimpleError, ValueError):
    """Özel fonksiyon tanım dışı çağrıldı (örn. Φ için γ kutupta)"""


class DomainError(DimpleError, ValueError):
    """İstenen seviye/parametre bu çözücünün bölgesinde değil"""


class PresetError(DimpleError, ValueError):
    """Unknown or incomplete run preset"""


class RootFindingError(DimpleError, RuntimeError):
    """Gerekli kök bulunamadı (bracket yok)"""


class NormalizationError(DimpleError, RuntimeError):
    """Dalga fonksiyonu normu güvenilir hesaplanamadı"""
