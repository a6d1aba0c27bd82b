"""Scenario data model: device profiles, system parameters, random sampling.

All in-memory quantities are SI base units (bits, bits/s, Hz, W, m).
Scenario files use Mbits / Mbps / dBm at the boundary and are converted
on load; see the schema in the README.

The default ``SystemParams`` reproduce the reference simulation setup:
10 MHz bandwidth, -174 dBm/Hz noise density, path-loss exponent 4,
24 dBm uplink power, a 40 Mbps shared cloud compression capacity,
compression ratio 0.01 and a 250 m cell.
"""

import hashlib
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import yaml

from .channel import ChannelStats, expected_rate, mean_snr
from .errors import ValidationError
from .rng import stream

MBIT = 1e6
MBPS = 1e6

# Devices are sampled no closer than this to the base station so the
# path-loss model cannot produce unbounded SNR.
MIN_DISTANCE_M = 10.0


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


@dataclass(frozen=True)
class DeviceProfile:
    """One device's task and capability parameters.

    Attributes:
        weight: fairness weight (> 0); scenario construction renormalizes
            weights to sum to 1.
        data_size_bits: raw payload size L (> 0).
        local_capacity_bps: on-device compression speed V_d (> 0).
        avg_rate_bps: long-run uplink rate R; may be None until derived
            from ``distance_m`` by the channel model.
        distance_m: distance to the base station; optional when
            avg_rate_bps is given directly.
    """

    weight: float
    data_size_bits: float
    local_capacity_bps: float
    avg_rate_bps: float | None = None
    distance_m: float | None = None

    def __post_init__(self):
        _require_positive("weight", self.weight)
        _require_positive("data_size_bits", self.data_size_bits)
        _require_positive("local_capacity_bps", self.local_capacity_bps)
        if self.avg_rate_bps is not None:
            _require_positive("avg_rate_bps", self.avg_rate_bps)
        if self.distance_m is not None:
            _require_positive("distance_m", self.distance_m)

    @property
    def rate(self) -> float:
        """avg_rate_bps, raising if it has not been set or derived."""
        if self.avg_rate_bps is None:
            raise ValidationError(
                "avg_rate_bps is not set; provide it or a distance_m to derive it")
        return self.avg_rate_bps


@dataclass(frozen=True)
class SystemParams:
    """Shared system parameters (defaults: reference setup above)."""

    cloud_capacity_bps: float = 40.0 * MBPS
    compression_ratio: float = 0.01
    bandwidth_hz: float = 10e6
    noise_density_w_hz: float = dbm_to_watts(-174.0)
    tx_power_w: float = dbm_to_watts(24.0)
    pathloss_exp: float = 4.0
    cell_radius_m: float = 250.0

    def __post_init__(self):
        _require_positive("cloud_capacity_bps", self.cloud_capacity_bps)
        if not (0.0 < self.compression_ratio < 1.0):
            raise ValidationError(
                f"compression_ratio must lie in (0, 1), got {self.compression_ratio}")
        _require_positive("bandwidth_hz", self.bandwidth_hz)
        _require_positive("noise_density_w_hz", self.noise_density_w_hz)
        _require_positive("tx_power_w", self.tx_power_w)
        if not (self.pathloss_exp >= 2.0 and math.isfinite(self.pathloss_exp)):
            raise ValidationError(
                f"pathloss_exp must be >= 2, got {self.pathloss_exp}")
        _require_positive("cell_radius_m", self.cell_radius_m)


@dataclass(frozen=True)
class Scenario:
    """K device profiles plus system parameters.

    Weights always sum to 1 (renormalized on construction); the applied
    scaling is recorded in ``weight_scale`` (original weight sum).
    """

    devices: tuple[DeviceProfile, ...]
    params: SystemParams
    weight_scale: float = 1.0

    @property
    def n_devices(self) -> int:
        return len(self.devices)

    def weights(self):
        return [d.weight for d in self.devices]


def _require_positive(name, value):
    if value is None or not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ValidationError(f"{name} must be a finite number, got {value!r}")
    if value <= 0:
        raise ValidationError(f"{name} must be positive, got {value}")


def validate_scenario(devices, params: SystemParams | None = None) -> Scenario:
    """Build a Scenario, renormalizing weights to sum to 1.

    Raises ValidationError (naming the field) for an empty device list or
    any out-of-range field.
    """
    params = params if params is not None else SystemParams()
    devices = tuple(devices)
    if not devices:
        raise ValidationError("devices must be a non-empty list")
    total = math.fsum(d.weight for d in devices)
    if not (total > 0 and math.isfinite(total)):
        raise ValidationError(f"weights must have a positive finite sum, got {total}")
    normalized = tuple(replace(d, weight=d.weight / total) for d in devices)
    return Scenario(devices=normalized, params=params, weight_scale=total)


@lru_cache(maxsize=4096)
def _rate_from_distance(params: SystemParams, distance_m: float) -> float:
    gbar = mean_snr(params.tx_power_w, distance_m, params.pathloss_exp,
                    params.noise_density_w_hz, params.bandwidth_hz)
    return expected_rate(ChannelStats(gbar, params.bandwidth_hz))


def sample_scenario(n_devices: int, seed: int,
                    params: SystemParams | None = None) -> Scenario:
    """Draw a random scenario matching the reference simulation setup.

    L_k ~ Uniform[10, 100] Mbits, V_d ~ Uniform[0.5, 2] Mbps, positions
    uniform over the cell disk (with a 10 m exclusion radius), equal
    weights, and R_k derived from distance by quadrature. Pure function
    of (n_devices, seed, params).
    """
    if n_devices < 1:
        raise ValidationError(f"n_devices must be >= 1, got {n_devices}")
    params = params if params is not None else SystemParams()
    g = stream("scenario", seed)
    sizes = g.uniform(10.0 * MBIT, 100.0 * MBIT, n_devices)
    capacities = g.uniform(0.5 * MBPS, 2.0 * MBPS, n_devices)
    # Uniform over the annulus area between MIN_DISTANCE_M and the cell edge.
    d2 = g.uniform(MIN_DISTANCE_M ** 2, params.cell_radius_m ** 2, n_devices)
    distances = [math.sqrt(v) for v in d2]
    devices = [
        DeviceProfile(weight=1.0, data_size_bits=float(sizes[k]),
                      local_capacity_bps=float(capacities[k]),
                      avg_rate_bps=_rate_from_distance(params, distances[k]),
                      distance_m=distances[k])
        for k in range(n_devices)
    ]
    return validate_scenario(devices, params)


# Five-device benchmark: devices 2-5 are fixed, device 1 is swept.
_BENCH_FIXED = ((90.0, 1.2), (80.0, 1.3), (70.0, 1.4), (60.0, 1.5))
_BENCH_DISTANCE_M = 100.0


def table2_scenario(data_size_bits: float, local_capacity_bps: float,
                    params: SystemParams | None = None) -> Scenario:
    """Five-device benchmark scenario with device 1 set from the arguments.

    Devices 2-5 hold (90, 80, 70, 60) Mbits and (1.2, 1.3, 1.4, 1.5) Mbps.
    Device 1 must lie within the sampled population ranges: L in [10, 100]
    Mbits and V_d in [0.5, 2] Mbps. All devices sit at a common 100 m
    distance so rates are equal and deterministic.
    """
    if not (10.0 * MBIT <= data_size_bits <= 100.0 * MBIT):
        raise ValidationError(
            f"data_size_bits must lie in [10, 100] Mbits, got {data_size_bits}")
    if not (0.5 * MBPS <= local_capacity_bps <= 2.0 * MBPS):
        raise ValidationError(
            f"local_capacity_bps must lie in [0.5, 2] Mbps, got {local_capacity_bps}")
    params = params if params is not None else SystemParams()
    rate = _rate_from_distance(params, _BENCH_DISTANCE_M)
    rows = [(data_size_bits / MBIT, local_capacity_bps / MBPS)] + list(_BENCH_FIXED)
    devices = [
        DeviceProfile(weight=1.0, data_size_bits=l_mb * MBIT,
                      local_capacity_bps=v_mb * MBPS,
                      avg_rate_bps=rate, distance_m=_BENCH_DISTANCE_M)
        for (l_mb, v_mb) in rows
    ]
    return validate_scenario(devices, params)


_DEVICE_KEYS = {"weight", "data_size_mbits", "local_capacity_mbps",
                "avg_rate_mbps", "distance_m"}
_PARAM_KEYS = {"cloud_capacity_mbps", "compression_ratio", "bandwidth_mhz",
               "noise_density_dbm_per_hz", "tx_power_dbm", "pathloss_exp",
               "cell_radius_m"}


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file (YAML; schema in the README).

    Every device needs either avg_rate_mbps or distance_m (the rate is
    then derived from the channel model). Parse errors keep the YAML line
    context; validation errors name the field and device index.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"cannot parse scenario file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "devices" not in doc:
        raise ValidationError(f"{path}: expected a mapping with a 'devices' list")

    raw_params = doc.get("params") or {}
    unknown = set(raw_params) - _PARAM_KEYS
    if unknown:
        raise ValidationError(f"{path}: unknown params keys {sorted(unknown)}")
    defaults = SystemParams()
    params = SystemParams(
        cloud_capacity_bps=float(raw_params.get(
            "cloud_capacity_mbps", defaults.cloud_capacity_bps / MBPS)) * MBPS,
        compression_ratio=float(raw_params.get(
            "compression_ratio", defaults.compression_ratio)),
        bandwidth_hz=float(raw_params.get(
            "bandwidth_mhz", defaults.bandwidth_hz / 1e6)) * 1e6,
        noise_density_w_hz=dbm_to_watts(float(raw_params["noise_density_dbm_per_hz"]))
        if "noise_density_dbm_per_hz" in raw_params else defaults.noise_density_w_hz,
        tx_power_w=dbm_to_watts(float(raw_params["tx_power_dbm"]))
        if "tx_power_dbm" in raw_params else defaults.tx_power_w,
        pathloss_exp=float(raw_params.get("pathloss_exp", defaults.pathloss_exp)),
        cell_radius_m=float(raw_params.get("cell_radius_m", defaults.cell_radius_m)),
    )

    raw_devices = doc["devices"]
    if not isinstance(raw_devices, list) or not raw_devices:
        raise ValidationError(f"{path}: 'devices' must be a non-empty list")
    devices = []
    for i, entry in enumerate(raw_devices):
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: device {i} must be a mapping")
        unknown = set(entry) - _DEVICE_KEYS
        if unknown:
            raise ValidationError(f"{path}: device {i} has unknown keys {sorted(unknown)}")
        for key in ("data_size_mbits", "local_capacity_mbps"):
            if key not in entry:
                raise ValidationError(f"{path}: device {i} is missing {key}")
        rate = entry.get("avg_rate_mbps")
        distance = entry.get("distance_m")
        if rate is None and distance is None:
            raise ValidationError(
                f"{path}: device {i} needs avg_rate_mbps or distance_m")
        try:
            rate_bps = (float(rate) * MBPS if rate is not None
                        else _rate_from_distance(params, float(distance)))
            devices.append(DeviceProfile(
                weight=float(entry.get("weight", 1.0)),
                data_size_bits=float(entry["data_size_mbits"]) * MBIT,
                local_capacity_bps=float(entry["local_capacity_mbps"]) * MBPS,
                avg_rate_bps=rate_bps,
                distance_m=float(distance) if distance is not None else None,
            ))
        except ValidationError as exc:
            raise ValidationError(f"{path}: device {i}: {exc}") from exc
    return validate_scenario(devices, params)


def save_scenario(scenario: Scenario, path) -> None:
    """Write a scenario file that round-trips through load_scenario."""
    params = scenario.params
    doc = {
        "params": {
            "cloud_capacity_mbps": params.cloud_capacity_bps / MBPS,
            "compression_ratio": params.compression_ratio,
            "bandwidth_mhz": params.bandwidth_hz / 1e6,
            "noise_density_dbm_per_hz":
                10.0 * math.log10(params.noise_density_w_hz * 1e3),
            "tx_power_dbm": 10.0 * math.log10(params.tx_power_w * 1e3),
            "pathloss_exp": params.pathloss_exp,
            "cell_radius_m": params.cell_radius_m,
        },
        "devices": [],
    }
    for dev in scenario.devices:
        entry = {
            "weight": dev.weight,
            "data_size_mbits": dev.data_size_bits / MBIT,
            "local_capacity_mbps": dev.local_capacity_bps / MBPS,
        }
        if dev.avg_rate_bps is not None:
            entry["avg_rate_mbps"] = dev.avg_rate_bps / MBPS
        if dev.distance_m is not None:
            entry["distance_m"] = dev.distance_m
        doc["devices"].append(entry)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def scenario_hash(scenario: Scenario) -> str:
    """Stable 12-hex-digit digest of all scenario values (SI units)."""
    params = scenario.params
    parts = [repr(v) for v in (
        params.cloud_capacity_bps, params.compression_ratio, params.bandwidth_hz,
        params.noise_density_w_hz, params.tx_power_w, params.pathloss_exp,
        params.cell_radius_m)]
    for dev in scenario.devices:
        parts.append("|".join(repr(v) for v in (
            dev.weight, dev.data_size_bits, dev.local_capacity_bps,
            dev.avg_rate_bps, dev.distance_m)))
    digest = hashlib.sha256(";".join(parts).encode("utf-8")).hexdigest()
    return digest[:12]
