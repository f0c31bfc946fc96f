"""Regenerate the shipped reference models.

Parameters are plausible placeholders (box-like links with rough masses), not
calibrated against real hardware.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "rbdpipe" / "data" / "models"
HALF_PI = math.pi / 2


def box(mass, size, com=(0.0, 0.0, 0.0)):
    x, y, z = size
    k = mass / 12.0
    return {"mass": mass, "com": list(com), "ixx": k * (y * y + z * z), "iyy": k * (x * x + z * z),
            "izz": k * (x * x + y * y), "ixy": 0.0, "ixz": 0.0, "iyz": 0.0}


def link(name, parent, kind=None, axis=None, xyz=(0, 0, 0), rpy=(0, 0, 0), inertia=None):
    doc = {"name": name, "parent": parent, "xform": {"rpy": list(rpy), "xyz": list(xyz)}, "inertia": inertia}
    if kind is not None:
        doc["joint"] = {"kind": kind, "axis": list(axis)}
    return doc


def iiwa():
    # Alternating +-90 degree rolls between consecutive z axes, as in the LBR chain.
    spec = [
        ("link1", 0.1575, (0, 0, 0), 4.0, (0.0, -0.03, 0.12)),
        ("link2", 0.2025, (HALF_PI, 0, math.pi), 4.0, (0.0003, 0.059, 0.042)),
        ("link3", 0.2045, (HALF_PI, 0, math.pi), 3.0, (0.0, 0.03, 0.13)),
        ("link4", 0.2155, (HALF_PI, 0, 0), 2.7, (0.0, 0.067, 0.034)),
        ("link5", 0.1845, (-HALF_PI, math.pi, 0), 1.7, (0.0001, 0.021, 0.076)),
        ("link6", 0.2155, (HALF_PI, 0, 0), 1.8, (0.0, 0.0006, 0.0004)),
        ("link7", 0.081, (-HALF_PI, math.pi, 0), 0.3, (0.0, 0.0, 0.02)),
    ]
    links, parent, prev_len = [], None, 0.0
    # Odd links sit at their parent's origin; even links are offset along the parent's y.
    for i, (name, length, rpy, mass, com) in enumerate(spec):
        xyz = (0.0, 0.0, 0.1575) if i == 0 else ((0.0, 0.0, 0.0) if i % 2 else (0.0, prev_len, 0.0))
        links.append(link(name, parent, "revolute", (0, 0, 1), xyz=xyz, rpy=rpy,
                          inertia=box(mass, (0.1, 0.1, max(length, 0.08)), com)))
        parent, prev_len = name, length
    return {"name": "iiwa", "root_mode": "fixed_base", "gravity": [0.0, 0.0, -9.81], "links": links}


def quadruped_arm():
    links = [link("trunk", None, inertia=box(12.0, (0.6, 0.3, 0.15)))]
    for tag, sx, sy in (("lf", 1, 1), ("rf", 1, -1), ("lh", -1, 1), ("rh", -1, -1)):
        links += [
            link(f"{tag}_hip", "trunk", "revolute", (1, 0, 0), xyz=(0.28 * sx, 0.1 * sy, 0.0),
                 inertia=box(0.7, (0.08, 0.08, 0.08), (0.0, 0.03 * sy, 0.0))),
            link(f"{tag}_thigh", f"{tag}_hip", "revolute", (0, 1, 0), xyz=(0.0, 0.08 * sy, 0.0),
                 inertia=box(1.0, (0.05, 0.05, 0.25), (0.0, 0.0, -0.1))),
            link(f"{tag}_shank", f"{tag}_thigh", "revolute", (0, 1, 0), xyz=(0.0, 0.0, -0.25),
                 inertia=box(0.2, (0.03, 0.03, 0.25), (0.0, 0.0, -0.12))),
        ]
    arm = [("arm_yaw", (0, 0, 1), (0.15, 0.0, 0.08), 1.2), ("arm_shoulder", (0, 1, 0), (0.0, 0.0, 0.06), 1.0),
           ("arm_elbow", (0, 1, 0), (0.3, 0.0, 0.0), 0.8), ("arm_wrist1", (1, 0, 0), (0.25, 0.0, 0.0), 0.4),
           ("arm_wrist2", (0, 1, 0), (0.05, 0.0, 0.0), 0.3), ("arm_wrist3", (1, 0, 0), (0.05, 0.0, 0.0), 0.2)]
    parent = "trunk"
    for name, axis, xyz, mass in arm:
        links.append(link(name, parent, "revolute", axis, xyz=xyz,
                          inertia=box(mass, (0.12, 0.05, 0.05), (0.05, 0.0, 0.0))))
        parent = name
    return {"name": "quadruped_arm", "root_mode": "floating_split", "gravity": [0.0, 0.0, -9.81],
            "links": links}


def humanoid():
    links = [link("pelvis", None, inertia=box(8.0, (0.2, 0.3, 0.15)))]
    parent = "pelvis"
    for name, axis, xyz, mass in (("torso1", (0, 0, 1), (0.0, 0.0, 0.1), 2.0),
                                  ("torso2", (0, 1, 0), (0.0, 0.0, 0.05), 2.0),
                                  ("torso3", (1, 0, 0), (0.0, 0.0, 0.05), 12.0)):
        links.append(link(name, parent, "revolute", axis, xyz=xyz,
                          inertia=box(mass, (0.2, 0.3, 0.1), (0.0, 0.0, 0.05))))
        parent = name
    arm = [("shoulder_pitch", (0, 1, 0), 2.0), ("shoulder_roll", (1, 0, 0), 0.8),
           ("shoulder_yaw", (0, 0, 1), 1.5), ("elbow", (0, 1, 0), 1.0),
           ("wrist_yaw", (0, 0, 1), 0.6), ("wrist_pitch", (0, 1, 0), 0.4), ("wrist_roll", (1, 0, 0), 0.3)]
    leg = [("hip_yaw", (0, 0, 1), 1.5), ("hip_roll", (1, 0, 0), 1.5), ("hip_pitch", (0, 1, 0), 4.0),
           ("knee", (0, 1, 0), 3.0), ("ankle_pitch", (0, 1, 0), 0.8), ("ankle_roll", (1, 0, 0), 1.0)]
    for side, sy in (("l", 1), ("r", -1)):
        parent = "torso3"
        for j, (name, axis, mass) in enumerate(arm):
            xyz = (0.0, 0.2 * sy, 0.3) if j == 0 else (0.0, 0.0, -0.12 if j % 2 else -0.05)
            links.append(link(f"{side}_{name}", parent, "revolute", axis, xyz=xyz,
                              inertia=box(mass, (0.06, 0.06, 0.2), (0.0, 0.0, -0.06))))
            parent = f"{side}_{name}"
    for side, sy in (("l", 1), ("r", -1)):
        parent = "pelvis"
        for j, (name, axis, mass) in enumerate(leg):
            xyz = (0.0, 0.1 * sy, -0.08) if j == 0 else (0.0, 0.0, -0.35 if name in ("knee", "ankle_pitch") else -0.03)
            links.append(link(f"{side}_{name}", parent, "revolute", axis, xyz=xyz,
                              inertia=box(mass, (0.08, 0.08, 0.3), (0.0, 0.0, -0.12))))
            parent = f"{side}_{name}"
    return {"name": "humanoid", "root_mode": "floating_split", "gravity": [0.0, 0.0, -9.81], "links": links}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for build in (iiwa, quadruped_arm, humanoid):
        doc = build()
        (OUT / f"{doc['name']}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {doc['name']}: {len(doc['links'])} links")


if __name__ == "__main__":
    main()
