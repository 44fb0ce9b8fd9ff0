from hofbauer_entropy.cli import main

raise SystemExit(main())
