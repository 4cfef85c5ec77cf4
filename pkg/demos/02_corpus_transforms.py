"""The four training-corpus conditions on a small hand-written example.

Swapping is token-based with case preserved; the ambiguous "her" picks
its reading (him/his) from the next token. Neutralizing either replaces
pronouns with they/them/their or deletes them outright.
"""

from embfair import (
    LabeledNote,
    build_condition,
    build_paired_testset,
    detokenize,
    neutralize,
    swap_gender,
    tokenize,
)

notes = [
    LabeledNote(id="a", text="She reported her mood was low. The nurse examined her.",
                label="depression", gender="F"),
    LabeledNote(id="b", text="He slept well. His appetite improved.",
                label="none", gender="M"),
]

print("=== original notes ===")
for note in notes:
    print(f"  [{note.gender}/{note.label}] {note.text}")

print("\n=== pronoun swap (note the two readings of 'her') ===")
for note in notes:
    print(f"  {swap_gender(note).text}")

print("\n=== neutralized, replace mode ===")
for note in notes:
    print(f"  {neutralize(note, 'replace').text}")

print("\n=== neutralized, remove mode ===")
for note in notes:
    print(f"  {neutralize(note, 'remove').text}")

print("\n=== condition sizes ===")
for condition in ("original", "swapped", "neutralized", "augmented"):
    built = build_condition(notes, condition)
    labels = sorted(n.label for n in built)
    print(f"  {condition:<12} {len(built)} notes, labels {labels}")

print("\n=== paired test set ===")
for orig, twin in build_paired_testset(notes):
    print(f"  {orig.id} [{orig.gender}] <-> {twin.id} [{twin.gender}]")

print("\n=== tokenizer offsets reconstruct the text exactly ===")
text = notes[0].text
tokens = tokenize(text)
print(f"  {len(tokens)} tokens; first five: {[t.text for t in tokens[:5]]}")
print(f"  reconstruction equals input: {detokenize(text, tokens) == text}")
