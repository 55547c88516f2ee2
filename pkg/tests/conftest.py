import os
import stat
import sys
import textwrap

import pytest

sys.path.insert(0, os.path.dirname(__file__))


def _script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text("#!" + sys.executable + "\n" + textwrap.dedent(body))
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


@pytest.fixture
def stub_solver(tmp_path):
    """Factory for fake external solvers: ``stub_solver(kind)`` returns a command."""

    def make(kind: str) -> str:
        if kind == "all-true":
            return _script(tmp_path, "all_true.py", """
                import sys
                text = open(sys.argv[1]).read()
                n = int([l for l in text.splitlines() if l.startswith("p")][0].split()[2])
                print("s SATISFIABLE")
                print("v " + " ".join(str(i) for i in range(1, n + 1)) + " 0")
                sys.exit(10)
            """)
        if kind == "all-false":
            return _script(tmp_path, "all_false.py", """
                import sys
                text = open(sys.argv[1]).read()
                n = int([l for l in text.splitlines() if l.startswith("p")][0].split()[2])
                print("SAT")
                print(" ".join(str(-i) for i in range(1, n + 1)) + " 0")
            """)
        if kind == "sleepy":
            return _script(tmp_path, "sleepy.py", """
                import time
                time.sleep(30)
                print("UNSAT")
            """)
        if kind == "garbage":
            return _script(tmp_path, "garbage.py", """
                print("I have no idea")
            """)
        if kind == "crash":
            return _script(tmp_path, "crash.py", """
                import sys
                sys.exit(3)
            """)
        raise ValueError(kind)

    return make
