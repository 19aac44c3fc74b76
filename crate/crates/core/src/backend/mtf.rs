//! Move-to-front recoding over the full byte alphabet.

fn identity_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    for (i, slot) in table.iter_mut().enumerate() {
        *slot = i as u8;
    }
    table
}

pub fn mtf_encode(data: &[u8]) -> Vec<u8> {
    let mut table = identity_table();
    data.iter()
        .map(|&b| {
            let idx = table.iter().position(|&x| x == b).expect("table holds every byte");
            table.copy_within(0..idx, 1);
            table[0] = b;
            idx as u8
        })
        .collect()
}

pub fn mtf_decode(data: &[u8]) -> Vec<u8> {
    let mut table = identity_table();
    data.iter()
        .map(|&idx| {
            let idx = idx as usize;
            let b = table[idx];
            table.copy_within(0..idx, 1);
            table[0] = b;
            b
        })
        .collect()
}
