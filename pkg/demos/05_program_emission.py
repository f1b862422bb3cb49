"""Turn a running system into a standalone program and check it is faithful.

Any bound system can be written out as a small text document, read back, and
compiled into source code that prints the system's trajectory line by line.
The generated program must agree with the in-process interpreter on every
line; `verify` runs both and compares the output streams.
"""

from metastable import autoprog, ca

INIT = "0000000000000001000000000000000"
STEPS = 15


def main():
    doc = autoprog.Document(system=ca.make_automaton(110, INIT), steps=STEPS)

    text = autoprog.emit(doc)
    print("portable document, first lines:")
    for line in text.splitlines()[:8]:
        print("  " + line)
    print("  ...")
    assert autoprog.parse(text) == doc
    print()

    source = autoprog.generate(doc, "python")
    print("generated python source, %d lines; sections:" % len(source.splitlines()))
    for line in source.splitlines():
        if line.startswith("# "):
            print("  " + line)
    print()

    report = autoprog.verify(doc, "python")
    print("python program output equals the interpreter: %s" % report.equal)

    if autoprog.toolchain_available("c"):
        report = autoprog.verify(doc, "c")
        print("compiled C program output equals the interpreter: %s" % report.equal)
    else:
        print("no C compiler on PATH, skipping the C route")


if __name__ == "__main__":
    main()
