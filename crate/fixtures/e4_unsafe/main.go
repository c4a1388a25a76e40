package main

import (
	"fmt"
	"unsafe"
)

func benign() {
	fmt.Println("benign function")
}

func hidden() {
	fmt.Println("hidden function reached through a forged pointer")
}

func forgeCall() {
	f := benign
	target := hidden
	*(*uintptr)(unsafe.Pointer(&f)) = *(*uintptr)(unsafe.Pointer(&target))
	f()
}

func readPastEnd() {
	arr := [4]int{1, 2, 3, 4}
	p := unsafe.Pointer(uintptr(unsafe.Pointer(&arr[0])) + 5*unsafe.Sizeof(arr[0]))
	fmt.Println(*(*int)(p))
}

func main() {
	forgeCall()
	readPastEnd()
}
