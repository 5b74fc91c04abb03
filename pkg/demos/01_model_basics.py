"""
Building and validating attack countermeasure trees
====================================================

Construct a small model two ways (builder API and text format), check it,
and see what the defender scenarios do to it.
"""

from actkit import (
    Scenario,
    and_gate,
    apply_scenario,
    attack,
    build_act,
    cm_gate,
    detect,
    mitigate,
    parse_act,
    serialize_act,
    validate_act,
)

# A server is compromised when the exploit lands AND the intrusion
# countermeasure (detector followed by a mitigation) does not stop it.
act = build_act("Server compromise", and_gate(
    "compromise",
    attack("deploy exploit", p=0.7),
    cm_gate("intrusion response",
            detect("ids alert", p=0.6),
            mitigate("quarantine host", p=0.8)),
))

# validate_act returns one diagnostic per broken structural rule
print("diagnostics:", validate_act(act) or "none")

# The same model as text. parse_act/serialize_act round-trip byte-exactly.
text = serialize_act(act)
print()
print(text)
assert serialize_act(parse_act(text)) == text

# Scenarios rewrite the defender's side before an analysis:
#   no-cm       strips every countermeasure gate
#   detect-only keeps detection but makes mitigation instantaneous
#   full        the model as written
for scenario in Scenario:
    resolved = apply_scenario(act, scenario)
    cms = sum(1 for _ in resolved.cm_gates())
    print(f"{scenario.value:12s} -> {len(resolved.nodes)} nodes, {cms} countermeasure(s)")
