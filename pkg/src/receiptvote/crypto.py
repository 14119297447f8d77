"""Pluggable signature and public-key encryption schemes.

Two signature schemes and two encryption schemes are registered:

* ``ed25519`` / ``x25519-aesgcm``: the production pair, backed by the
  ``cryptography`` library.  Key generation draws seed bytes from the caller's
  rng, so keys (and Ed25519 signatures, which are deterministic) reproduce
  under a seeded source.
* ``hmac-demo`` / ``xor-demo``: deterministic toy schemes for reproducible
  fixtures.  They satisfy the same round-trip and tamper-rejection contracts
  but offer no security: the "public" key equals the secret key.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import random
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import DecryptionError, SchemeMismatchError

DEFAULT_SIGNATURE_SCHEME = "ed25519"
DEFAULT_ENCRYPTION_SCHEME = "x25519-aesgcm"


@dataclass(frozen=True)
class PublicKey:
    scheme: str
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


@dataclass(frozen=True)
class SecretKey:
    scheme: str
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


@dataclass(frozen=True)
class KeyPair:
    scheme: str
    public: PublicKey
    secret: SecretKey


@dataclass(frozen=True)
class Signature:
    scheme: str
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


@dataclass(frozen=True)
class Ciphertext:
    scheme: str
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


def _seed_bytes(rng: random.Random, n: int) -> bytes:
    return rng.randbytes(n)


class Ed25519Scheme:
    name = "ed25519"

    def keygen(self, rng: random.Random) -> KeyPair:
        raw = _seed_bytes(rng, 32)
        sk = Ed25519PrivateKey.from_private_bytes(raw)
        pub = sk.public_key().public_bytes_raw()
        return KeyPair(self.name, PublicKey(self.name, pub), SecretKey(self.name, raw))

    def sign(self, secret: SecretKey, message: bytes) -> Signature:
        sk = Ed25519PrivateKey.from_private_bytes(secret.data)
        return Signature(self.name, sk.sign(message))

    def verify(self, public: PublicKey, message: bytes, signature: Signature) -> bool:
        try:
            Ed25519PublicKey.from_public_bytes(public.data).verify(
                signature.data, message
            )
            return True
        except (InvalidSignature, ValueError):
            return False


class HmacDemoScheme:
    """Deterministic fixture scheme: sign = HMAC-SHA256 with the shared key."""

    name = "hmac-demo"

    def keygen(self, rng: random.Random) -> KeyPair:
        raw = _seed_bytes(rng, 32)
        return KeyPair(self.name, PublicKey(self.name, raw), SecretKey(self.name, raw))

    def sign(self, secret: SecretKey, message: bytes) -> Signature:
        return Signature(self.name, hmac.new(secret.data, message, hashlib.sha256).digest())

    def verify(self, public: PublicKey, message: bytes, signature: Signature) -> bool:
        expected = hmac.new(public.data, message, hashlib.sha256).digest()
        return hmac.compare_digest(expected, signature.data)


class X25519AesGcmScheme:
    """Hybrid construction: ephemeral X25519 agreement, HKDF, AES-256-GCM.

    The wire format is ``ephemeral_public(32) || gcm_ciphertext``; key and
    nonce both come out of the KDF, bound to the two public keys, so a fixed
    nonce counter is never reused across ephemeral keys.
    """

    name = "x25519-aesgcm"
    _info = b"receiptvote hybrid v1"

    def keygen(self, rng: random.Random) -> KeyPair:
        raw = _seed_bytes(rng, 32)
        sk = X25519PrivateKey.from_private_bytes(raw)
        pub = sk.public_key().public_bytes_raw()
        return KeyPair(self.name, PublicKey(self.name, pub), SecretKey(self.name, raw))

    def _derive(self, shared: bytes, eph_pub: bytes, recipient_pub: bytes) -> tuple[bytes, bytes]:
        okm = HKDF(
            algorithm=SHA256(),
            length=44,
            salt=eph_pub + recipient_pub,
            info=self._info,
        ).derive(shared)
        return okm[:32], okm[32:]

    def encrypt(
        self, public: PublicKey, plaintext: bytes, rng: random.Random | None = None
    ) -> Ciphertext:
        eph_raw = _seed_bytes(rng, 32) if rng is not None else os.urandom(32)
        eph_sk = X25519PrivateKey.from_private_bytes(eph_raw)
        eph_pub = eph_sk.public_key().public_bytes_raw()
        shared = eph_sk.exchange(X25519PublicKey.from_public_bytes(public.data))
        key, nonce = self._derive(shared, eph_pub, public.data)
        sealed = AESGCM(key).encrypt(nonce, plaintext, None)
        return Ciphertext(self.name, eph_pub + sealed)

    def decrypt(self, secret: SecretKey, ciphertext: Ciphertext) -> bytes:
        if len(ciphertext.data) < 32 + 16:
            raise DecryptionError("ciphertext too short")
        eph_pub, sealed = ciphertext.data[:32], ciphertext.data[32:]
        sk = X25519PrivateKey.from_private_bytes(secret.data)
        try:
            shared = sk.exchange(X25519PublicKey.from_public_bytes(eph_pub))
        except ValueError as exc:
            raise DecryptionError("malformed ephemeral key") from exc
        pub = sk.public_key().public_bytes_raw()
        key, nonce = self._derive(shared, eph_pub, pub)
        try:
            return AESGCM(key).decrypt(nonce, sealed, None)
        except InvalidTag as exc:
            raise DecryptionError("integrity check failed") from exc


class XorDemoScheme:
    """Deterministic fixture cipher: SHA-256 keystream XOR plus an HMAC tag."""

    name = "xor-demo"

    def keygen(self, rng: random.Random) -> KeyPair:
        raw = _seed_bytes(rng, 32)
        return KeyPair(self.name, PublicKey(self.name, raw), SecretKey(self.name, raw))

    def _keystream(self, key: bytes, nonce: bytes, n: int) -> bytes:
        out = bytearray()
        counter = 0
        while len(out) < n:
            out += hashlib.sha256(key + nonce + counter.to_bytes(8, "big")).digest()
            counter += 1
        return bytes(out[:n])

    def encrypt(
        self, public: PublicKey, plaintext: bytes, rng: random.Random | None = None
    ) -> Ciphertext:
        nonce = _seed_bytes(rng, 16) if rng is not None else os.urandom(16)
        body = bytes(a ^ b for a, b in zip(plaintext, self._keystream(public.data, nonce, len(plaintext))))
        tag = hmac.new(public.data, nonce + body, hashlib.sha256).digest()[:16]
        return Ciphertext(self.name, nonce + body + tag)

    def decrypt(self, secret: SecretKey, ciphertext: Ciphertext) -> bytes:
        if len(ciphertext.data) < 32:
            raise DecryptionError("ciphertext too short")
        nonce, rest = ciphertext.data[:16], ciphertext.data[16:]
        body, tag = rest[:-16], rest[-16:]
        expected = hmac.new(secret.data, nonce + body, hashlib.sha256).digest()[:16]
        if not hmac.compare_digest(expected, tag):
            raise DecryptionError("integrity check failed")
        return bytes(a ^ b for a, b in zip(body, self._keystream(secret.data, nonce, len(body))))


SIGNATURE_SCHEMES = {s.name: s for s in (Ed25519Scheme(), HmacDemoScheme())}
ENCRYPTION_SCHEMES = {s.name: s for s in (X25519AesGcmScheme(), XorDemoScheme())}


def signature_scheme(name: str):
    try:
        return SIGNATURE_SCHEMES[name]
    except KeyError:
        raise SchemeMismatchError(f"unknown signature scheme {name!r}") from None


def encryption_scheme(name: str):
    try:
        return ENCRYPTION_SCHEMES[name]
    except KeyError:
        raise SchemeMismatchError(f"unknown encryption scheme {name!r}") from None


def keygen(rng: random.Random, scheme: str = DEFAULT_SIGNATURE_SCHEME) -> KeyPair:
    """Generate a fresh keypair for the named scheme from the given rng."""
    if scheme in SIGNATURE_SCHEMES:
        return SIGNATURE_SCHEMES[scheme].keygen(rng)
    if scheme in ENCRYPTION_SCHEMES:
        return ENCRYPTION_SCHEMES[scheme].keygen(rng)
    raise SchemeMismatchError(f"unknown scheme {scheme!r}")


def sign(secret: SecretKey, message: bytes) -> Signature:
    return signature_scheme(secret.scheme).sign(secret, message)


def verify(public: PublicKey, message: bytes, signature: Signature) -> bool:
    """True iff the signature is valid; malformed input yields False."""
    if public.scheme not in SIGNATURE_SCHEMES:
        return False
    if signature.scheme != public.scheme:
        return False
    return SIGNATURE_SCHEMES[public.scheme].verify(public, message, signature)


def encrypt_to(
    public: PublicKey, plaintext: bytes, rng: random.Random | None = None
) -> Ciphertext:
    """Encrypt to the holder of the paired secret key.

    ``rng`` makes the ciphertext reproducible for seeded simulations; left
    None, OS randomness is used.
    """
    return encryption_scheme(public.scheme).encrypt(public, plaintext, rng)


def decrypt(secret: SecretKey, ciphertext: Ciphertext) -> bytes:
    if ciphertext.scheme != secret.scheme:
        raise SchemeMismatchError(
            f"ciphertext scheme {ciphertext.scheme!r} does not match key {secret.scheme!r}"
        )
    return encryption_scheme(secret.scheme).decrypt(secret, ciphertext)
