use tailor::pipeline::{compile_text, Options};

fn count(src: &str, o: u8) -> u64 {
    let c = compile_text(src, None, &Options::preset(o, 0)).unwrap();
    let mut s = c.session(1);
    s.enumerate(None, &mut |_| Ok(())).unwrap()
}

#[test]
fn smoke() {
    for o in 0..=3 {
        assert_eq!(count("language ESSENCE' 1.0\nfind x : int(-1..1)\nfind y : int(0..1)\nsuch that |x| = y\n", o), 3);
        assert_eq!(count("language ESSENCE' 1.0\nfind x,y,z : int(0..1)\nsuch that x*y = z\n", o), 4);
        assert_eq!(count("language ESSENCE' 1.0\nfind x,y : int(1..6)\nsuch that x*y = 6\n", o), 4);
        assert_eq!(count("language ESSENCE' 1.0\nfind a,b : bool\nsuch that 2*toInt(a)+3*toInt(b) <= 4\n", o), 3);
        assert_eq!(count("language ESSENCE' 1.0\nfind x,y,z : int(0..2)\nsuch that x+y = z\n", o), 6);
        assert_eq!(count("language ESSENCE' 1.0\nfind a,b,c : int(0..1)\nsuch that table([a,b,c], [[0,0,0],[0,1,1],[1,0,1]])\n", o), 3);
        assert_eq!(count("language ESSENCE' 1.0\nfind x : int(1..3)\n", o), 3);
        assert_eq!(count("language ESSENCE' 1.0\nfind x,y : int(1..3)\nbranching on [x]\nsuch that y = x\n", o), 3);
        assert_eq!(count("language ESSENCE' 1.0\nfind x : matrix indexed by [int(1..4)] of int(1..3)\nsuch that allDiff(x)\n", o), 0);
    }
}
