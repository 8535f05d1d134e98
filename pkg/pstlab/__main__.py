from pstlab.main import run

run()
